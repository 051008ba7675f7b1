#pragma once

// Text dump of a ColumnMatrix:
//
//   <m> <n>
//   col <j> : <row>:<sign> <row>:<sign> ...        sparse, unit scale
//   col <j> scale <v> : <row>:<sign> ...           sparse, scaled
//   col <j> dense : <v0> <v1> ... <v(m-1)>         dense
//
// Reals are written with 17 significant digits so parsing restores them bit for bit.

#include <charconv>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "subemb/ensembles.hpp"
#include "subemb/error.hpp"

namespace subemb {

namespace detail {

inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
T parse_number(std::string_view token, const char* what) {
    T value{};
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ParameterError(std::string("malformed ") + what + " '" + std::string(token) + "'");
    }
    return value;
}

}  // namespace detail

inline std::string dump_matrix(const ColumnMatrix& a) {
    std::string out = std::to_string(a.rows()) + " " + std::to_string(a.cols()) + "\n";
    for (std::size_t j = 0; j < a.cols(); ++j) {
        out += "col " + std::to_string(j);
        if (const auto* sp = std::get_if<SparseColumn>(&a.column(j))) {
            if (sp->scale != 1.0) {
                out += " scale " + detail::format_real(sp->scale);
            }
            out += " :";
            for (const auto& e : sp->entries) {
                out += " " + std::to_string(e.row) + ":" + (e.sign > 0 ? "1" : "-1");
            }
        } else {
            out += " dense :";
            for (double v : std::get<DenseColumn>(a.column(j)).values) {
                out += " " + detail::format_real(v);
            }
        }
        out += "\n";
    }
    return out;
}

inline ColumnMatrix parse_matrix(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) {
        throw ParameterError("matrix dump is empty");
    }
    std::size_t m = 0;
    std::size_t n = 0;
    {
        std::istringstream header(line);
        std::string ms;
        std::string ns;
        std::string extra;
        if (!(header >> ms >> ns) || (header >> extra)) {
            throw ParameterError("matrix dump header must be '<m> <n>'");
        }
        m = detail::parse_number<std::size_t>(ms, "row count");
        n = detail::parse_number<std::size_t>(ns, "column count");
    }
    std::vector<Column> cols;
    cols.reserve(n);
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::vector<std::string> tokens;
        for (std::string t; row >> t;) {
            tokens.push_back(t);
        }
        if (tokens.size() < 3 || tokens[0] != "col") {
            throw ParameterError("malformed column line '" + line + "'");
        }
        if (detail::parse_number<std::size_t>(tokens[1], "column index") != cols.size()) {
            throw ParameterError("columns must appear in order, starting at 0");
        }
        std::size_t pos = 2;
        if (tokens[pos] == "dense") {
            if (tokens.size() < 4 || tokens[3] != ":") {
                throw ParameterError("malformed dense column line '" + line + "'");
            }
            DenseColumn col;
            for (pos = 4; pos < tokens.size(); ++pos) {
                col.values.push_back(detail::parse_number<double>(tokens[pos], "value"));
            }
            cols.emplace_back(std::move(col));
            continue;
        }
        SparseColumn col;
        if (tokens[pos] == "scale") {
            if (tokens.size() < 5) {
                throw ParameterError("malformed scaled column line '" + line + "'");
            }
            col.scale = detail::parse_number<double>(tokens[3], "scale");
            pos = 4;
        }
        if (tokens[pos] != ":") {
            throw ParameterError("malformed column line '" + line + "'");
        }
        for (++pos; pos < tokens.size(); ++pos) {
            const std::string& t = tokens[pos];
            const auto colon = t.find(':');
            if (colon == std::string::npos) {
                throw ParameterError("sparse entry must be '<row>:<sign>', got '" + t + "'");
            }
            const auto r = detail::parse_number<std::uint32_t>(std::string_view(t).substr(0, colon), "row");
            const auto sg = detail::parse_number<int>(std::string_view(t).substr(colon + 1), "sign");
            if (sg != 1 && sg != -1) {
                throw ParameterError("sparse sign must be 1 or -1, got '" + t + "'");
            }
            col.entries.push_back({r, static_cast<std::int8_t>(sg)});
        }
        cols.emplace_back(std::move(col));
    }
    if (cols.size() != n) {
        throw ParameterError("matrix dump declares " + std::to_string(n) + " columns but contains " +
                             std::to_string(cols.size()));
    }
    return ColumnMatrix(m, std::move(cols));
}

}  // namespace subemb
