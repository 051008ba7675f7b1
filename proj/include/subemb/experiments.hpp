#pragma once

// Named experiments: configuration -> trials -> report rows -> CSV / JSON.
// Only the public surface of the other modules is used here.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "subemb/complexity.hpp"
#include "subemb/ensembles.hpp"
#include "subemb/error.hpp"
#include "subemb/isometry.hpp"
#include "subemb/oracles.hpp"
#include "subemb/parallel.hpp"
#include "subemb/random.hpp"
#include "subemb/stats.hpp"
#include "subemb/testsets.hpp"
#include "subemb/version.hpp"

namespace subemb::experiments {

enum class Kind { Divergence, LowerBoundExactSparse, Normalization, Psi2Scaling, TailProfile, ConjectureDiag };

inline std::string to_string(Kind k) {
    switch (k) {
        case Kind::Divergence: return "divergence";
        case Kind::LowerBoundExactSparse: return "lower_bound_exact_sparse";
        case Kind::Normalization: return "normalization";
        case Kind::Psi2Scaling: return "psi2_scaling";
        case Kind::TailProfile: return "tail_profile";
        case Kind::ConjectureDiag: return "conjecture_diag";
    }
    return "unknown";
}

inline Kind kind_from_string(const std::string& name) {
    for (Kind k : {Kind::Divergence, Kind::LowerBoundExactSparse, Kind::Normalization, Kind::Psi2Scaling,
                   Kind::TailProfile, Kind::ConjectureDiag}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ConfigError("unknown experiment kind '" + name + "'");
}

struct Grid {
    std::vector<std::size_t> m;
    std::vector<std::size_t> s;
    std::vector<std::size_t> n;

    friend bool operator==(const Grid&, const Grid&) = default;
};

struct ExperimentConfig {
    Kind kind = Kind::Divergence;
    Grid grid;
    std::size_t trials = 1;
    std::size_t mc_samples = 2000;  // Monte Carlo samples for widths / psi_2 fits
    std::uint64_t seed = 0;
    std::string output;  // empty: do not write
    bool retain_trials = false;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

    void validate() const {
        if (trials < 1) {
            throw ConfigError("trials must be at least 1");
        }
        if (grid.m.empty()) {
            throw ConfigError("grid.m must be nonempty");
        }
        const bool needs_s = kind != Kind::TailProfile;
        const bool needs_n = kind == Kind::Divergence || kind == Kind::Normalization || kind == Kind::TailProfile ||
                             kind == Kind::ConjectureDiag;
        if (needs_s && grid.s.empty()) {
            throw ConfigError("grid.s must be nonempty for " + to_string(kind));
        }
        if (needs_n && grid.n.empty()) {
            throw ConfigError("grid.n must be nonempty for " + to_string(kind));
        }
        for (auto m : grid.m) {
            if (m == 0) {
                throw ConfigError("grid.m entries must be positive");
            }
            for (auto s : grid.s) {
                if (needs_s && (s < 1 || s > m)) {
                    throw ConfigError("grid requires 1 <= s <= m for every (m, s)");
                }
            }
        }
        if (needs_n) {
            for (auto n : grid.n) {
                if (n < 2) {
                    throw ConfigError("grid.n entries must be at least 2 (pair differences)");
                }
            }
        }
        if ((kind == Kind::LowerBoundExactSparse || kind == Kind::TailProfile || kind == Kind::ConjectureDiag) &&
            mc_samples < 2) {
            throw ConfigError("mc_samples must be at least 2");
        }
        if (kind == Kind::Psi2Scaling && mc_samples < 100) {
            throw ConfigError("psi2_scaling needs mc_samples >= 100");
        }
    }
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
    return {{"kind", to_string(c.kind)},
            {"grid", {{"m", c.grid.m}, {"s", c.grid.s}, {"n", c.grid.n}}},
            {"trials", c.trials},
            {"mc_samples", c.mc_samples},
            {"seed", c.seed},
            {"output", c.output},
            {"retain_trials", c.retain_trials}};
}

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError("unknown field '" + key + "' in " + where);
        }
    }
}

template <typename T>
T field(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace detail

/// Strict parse: unknown fields are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    detail::reject_unknown(j, {"kind", "grid", "trials", "mc_samples", "seed", "output", "retain_trials"}, "config");
    if (!j.contains("kind")) {
        throw ConfigError("config is missing 'kind'");
    }
    ExperimentConfig c;
    c.kind = kind_from_string(detail::field<std::string>(j, "kind", ""));
    const nlohmann::json grid = j.contains("grid") ? j.at("grid") : nlohmann::json::object();
    detail::reject_unknown(grid, {"m", "s", "n"}, "grid");
    using List = std::vector<std::size_t>;
    c.grid = {detail::field<List>(grid, "m", {}), detail::field<List>(grid, "s", {}), detail::field<List>(grid, "n", {})};
    const auto trials = detail::field<long long>(j, "trials", 1);
    if (trials < 1) {
        throw ConfigError("trials must be at least 1");
    }
    c.trials = static_cast<std::size_t>(trials);
    c.mc_samples = detail::field<std::size_t>(j, "mc_samples", c.mc_samples);
    c.seed = detail::field<std::uint64_t>(j, "seed", 0);
    c.output = detail::field<std::string>(j, "output", "");
    c.retain_trials = detail::field<bool>(j, "retain_trials", false);
    c.validate();
    return c;
}

inline ExperimentConfig config_from_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

using Value = std::variant<std::monostate, std::int64_t, double, std::string>;
using Row = std::vector<Value>;

struct Provenance {
    std::string version;
    std::uint64_t seed = 0;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<std::string> columns;
    std::vector<Row> rows;
    std::vector<std::vector<double>> trial_data;  // per row, only when retain_trials
    Provenance provenance;

    friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;

    /// Index of a named column.
    [[nodiscard]] std::size_t column(const std::string& name) const {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) {
            throw ParameterError("report has no column '" + name + "'");
        }
        return static_cast<std::size_t>(it - columns.begin());
    }

    [[nodiscard]] double number(std::size_t row, const std::string& name) const {
        const Value& v = rows.at(row).at(column(name));
        if (const auto* d = std::get_if<double>(&v)) {
            return *d;
        }
        if (const auto* i = std::get_if<std::int64_t>(&v)) {
            return static_cast<double>(*i);
        }
        throw ParameterError("column '" + name + "' is not numeric in row " + std::to_string(row));
    }
};

namespace detail {

inline Value integer(std::size_t v) { return static_cast<std::int64_t>(v); }

struct Cell {
    std::size_t m = 0;
    std::size_t s = 0;
    std::size_t n = 0;
};

/// Grid cells in row order: s outermost, then n, then m.
inline std::vector<Cell> cells(const ExperimentConfig& c) {
    const std::vector<std::size_t> one{0};
    const auto& ss = c.grid.s.empty() ? one : c.grid.s;
    const auto& ns = c.grid.n.empty() ? one : c.grid.n;
    std::vector<Cell> out;
    for (auto s : ss) {
        for (auto n : ns) {
            for (auto m : c.grid.m) {
                out.push_back({m, s, n});
            }
        }
    }
    return out;
}

enum Arm : std::uint64_t { ArmApprox = 1, ArmExact = 2, ArmNormalized = 3, ArmWidth = 4 };

inline double sqrt_of(std::size_t v) { return std::sqrt(static_cast<double>(v)); }

inline void run_divergence(const ExperimentConfig& c, ExperimentReport& r) {
    r.columns = {"kind", "m", "s", "n", "trials", "approx_mean", "approx_stderr", "exact_mean", "exact_stderr",
                 "normalized_mean", "normalized_stderr", "oracle"};
    const auto all = cells(c);
    for (std::size_t idx = 0; idx < all.size(); ++idx) {
        const auto [m, s, n] = all[idx];
        const std::uint64_t cell_seed = derive_seed(c.seed, idx);
        const double lambda = sqrt_of(s);
        const auto singleton = build_set(SetKind::Singleton, {.n = 1});
        const auto pairs = build_set(SetKind::PairDifferences, {.n = n});
        const auto approx = isometry_trials(EnsembleSpec::approx_sparse(m, 1, s), singleton, lambda, c.trials,
                                            derive_seed(cell_seed, ArmApprox), c.retain_trials);
        const auto exact = isometry_trials(EnsembleSpec::exact_sparse(m, n, s), pairs, lambda, c.trials,
                                           derive_seed(cell_seed, ArmExact), c.retain_trials);
        const auto normalized =
            isometry_trials(EnsembleSpec::column_normalized(EnsembleSpec::approx_sparse(m, n, s), lambda), pairs,
                            lambda, c.trials, derive_seed(cell_seed, ArmNormalized), c.retain_trials);
        r.rows.push_back({to_string(c.kind), integer(m), integer(s), integer(n), integer(c.trials), approx.mean,
                          approx.std_error, exact.mean, exact.std_error, normalized.mean, normalized.std_error,
                          oracles::binom_sqrt_deviation(m, s).value});
        if (c.retain_trials) {
            std::vector<double> joined = approx.per_trial;
            joined.insert(joined.end(), exact.per_trial.begin(), exact.per_trial.end());
            joined.insert(joined.end(), normalized.per_trial.begin(), normalized.per_trial.end());
            r.trial_data.push_back(std::move(joined));
        }
    }
}

inline constexpr std::uint64_t kLowerBoundColumnBudget = 2'000'000;

inline void run_lower_bound(const ExperimentConfig& c, ExperimentReport& r) {
    r.columns = {"kind", "m", "s", "n", "trials", "zero_frequency", "mean_delta", "stderr_delta",
                 "complexity", "complexity_stderr", "ratio", "oracle"};
    const auto all = cells(c);
    for (std::size_t idx = 0; idx < all.size(); ++idx) {
        const auto [m, s, unused] = all[idx];
        if (s > 2 || m > 8) {
            throw BudgetExceeded("lower_bound_exact_sparse caps s <= 2 and m <= 8 (cell m=" + std::to_string(m) +
                                 ", s=" + std::to_string(s) + ")");
        }
        const std::uint64_t n = oracles::choose_n_for_lower_bound(m, s);
        if (n > kLowerBoundColumnBudget) {
            throw BudgetExceeded("lower_bound_exact_sparse cell m=" + std::to_string(m) + ", s=" + std::to_string(s) +
                                 " needs n=" + std::to_string(n) + " columns, over the 2e6 budget");
        }
        const std::uint64_t cell_seed = derive_seed(c.seed, idx);
        const auto spec = EnsembleSpec::exact_sparse(m, static_cast<std::size_t>(n), s);
        spec.validate();
        const double target = sqrt_of(s) * std::numbers::sqrt2;
        std::vector<double> deltas(c.trials);
        std::vector<double> zero(c.trials);
        // T = {e1 - ej}: stream the columns and compare each with the first, so
        // neither T nor A is held in memory. Column j reads the same stream as
        // column j of sample_matrix under this seed.
        parallel::for_each_index(c.trials, [&](std::size_t i) {
            const SeedPath path{derive_seed(cell_seed, ArmExact), i, 0};
            Stream first_stream(path);
            const Column first = subemb::detail::sample_base_column(spec, first_stream);
            const double first_sq = dot(first, first);
            double worst = 0.0;
            bool collided = false;
            for (std::uint64_t j = 1; j < n; ++j) {
                Stream stream({path.master_seed, path.trial_index, j});
                const Column col = subemb::detail::sample_base_column(spec, stream);
                const double norm_sq = first_sq + dot(col, col) - 2.0 * dot(first, col);
                const double norm = std::sqrt(std::max(norm_sq, 0.0));
                collided = collided || norm == 0.0;
                worst = std::max(worst, std::abs(norm - target));
            }
            zero[i] = collided ? 1.0 : 0.0;
            deltas[i] = worst;
        });
        const auto gamma = difference_set_complexity(n, c.mc_samples, derive_seed(cell_seed, ArmWidth));
        const double mean_delta = stats::mean(deltas);
        const double q = oracles::collision_probability(m, s).value;
        const double forced = 1.0 - std::pow(1.0 - q, static_cast<double>(n - 1));
        const double log_factor = std::sqrt(std::log(2.0 * static_cast<double>(m) / static_cast<double>(s)));
        r.rows.push_back({to_string(c.kind), integer(m), integer(s), integer(n), integer(c.trials), stats::mean(zero),
                          mean_delta, stats::standard_error(deltas), gamma.value, gamma.std_error,
                          mean_delta * log_factor / gamma.value, forced});
        if (c.retain_trials) {
            r.trial_data.push_back(deltas);
        }
    }
}

inline void run_normalization(const ExperimentConfig& c, ExperimentReport& r) {
    r.columns = {"kind", "m", "s", "n", "trials", "unnormalized_mean", "unnormalized_stderr", "normalized_mean",
                 "normalized_stderr", "paired_diff_mean", "paired_diff_stderr", "zero_resample_fraction"};
    const auto all = cells(c);
    for (std::size_t idx = 0; idx < all.size(); ++idx) {
        const auto [m, s, n] = all[idx];
        // Both arms read the same streams, so accepted first draws coincide.
        const std::uint64_t trial_seed = derive_seed(derive_seed(c.seed, idx), ArmApprox);
        const double lambda = sqrt_of(s);
        const auto base = EnsembleSpec::approx_sparse(m, n, s);
        const auto normalized = EnsembleSpec::column_normalized(base, lambda);
        const auto pairs = build_set(SetKind::PairDifferences, {.n = n});
        std::vector<double> raw(c.trials);
        std::vector<double> norm(c.trials);
        std::vector<double> clean(c.trials);
        parallel::for_each_index(c.trials, [&](std::size_t i) {
            const SeedPath path{trial_seed, i, 0};
            raw[i] = distortion_sup(pairs, sample_matrix(base, path), lambda).delta;
            const auto drawn = normalize_columns_conditional(normalized, path);
            norm[i] = distortion_sup(pairs, drawn.matrix, lambda).delta;
            clean[i] = std::all_of(drawn.resample_counts.begin(), drawn.resample_counts.end(),
                                   [](std::size_t k) { return k == 0; })
                           ? 1.0
                           : 0.0;
        });
        std::vector<double> diff(c.trials);
        for (std::size_t i = 0; i < c.trials; ++i) {
            diff[i] = raw[i] - norm[i];
        }
        r.rows.push_back({to_string(c.kind), integer(m), integer(s), integer(n), integer(c.trials), stats::mean(raw),
                          stats::standard_error(raw), stats::mean(norm), stats::standard_error(norm),
                          stats::mean(diff), stats::standard_error(diff), stats::mean(clean)});
        if (c.retain_trials) {
            std::vector<double> joined = raw;
            joined.insert(joined.end(), norm.begin(), norm.end());
            r.trial_data.push_back(std::move(joined));
        }
    }
}

inline void run_psi2_scaling(const ExperimentConfig& c, ExperimentReport& r) {
    r.columns = {"kind", "m", "s", "samples", "psi2_mgf", "psi2_moment", "ratio", "oracle"};
    const auto all = cells(c);
    for (std::size_t idx = 0; idx < all.size(); ++idx) {
        const auto [m, s, unused] = all[idx];
        const std::uint64_t cell_seed = derive_seed(c.seed, idx);
        const auto spec = EnsembleSpec::approx_sparse(m, 1, s);
        const double inv_sqrt_m = 1.0 / sqrt_of(m);
        std::vector<double> marginal(c.mc_samples);
        parallel::for_each_index(c.mc_samples, [&](std::size_t i) {
            // <A_1, u> with u = (1, ..., 1)/sqrt(m)
            const auto a = sample_matrix(spec, {cell_seed, i, 0});
            const auto& col = std::get<SparseColumn>(a.column(0));
            long long sum = 0;
            for (const auto& e : col.entries) {
                sum += e.sign;
            }
            marginal[i] = col.scale * static_cast<double>(sum) * inv_sqrt_m;
        });
        const double mgf = empirical_psi2(marginal, Psi2Method::MgfRoot).value;
        const double moment = empirical_psi2(marginal, Psi2Method::MomentSup).value;
        const double closed =
            oracles::scalar_psi2_closed_form({oracles::ScalarLaw::Kind::SparseSign, m, s, 0.0}).value;
        r.rows.push_back({to_string(c.kind), integer(m), integer(s), integer(c.mc_samples), mgf, moment,
                          mgf / closed, closed});
        if (c.retain_trials) {
            r.trial_data.push_back(marginal);
        }
    }
}

inline void run_tail_profile(const ExperimentConfig& c, ExperimentReport& r) {
    r.columns = {"kind", "m", "n", "trials", "width", "rad", "fitted_a", "exceed_u1", "bound_u1",
                 "exceed_u2", "bound_u2", "exceed_u3", "bound_u3"};
    const auto all = cells(c);
    for (std::size_t idx = 0; idx < all.size(); ++idx) {
        const auto [m, unused, n] = all[idx];
        const std::uint64_t cell_seed = derive_seed(c.seed, idx);
        const auto t = build_set(SetKind::PairDifferences, {.n = n});
        const auto report = isometry_trials(EnsembleSpec::dense_gaussian(m, n), t, 1.0, c.trials,
                                            derive_seed(cell_seed, ArmExact), true);
        const auto width = estimate_width(t, c.mc_samples, derive_seed(cell_seed, ArmWidth));
        const double rad = rad_diam(t).first;
        std::vector<double> sorted = report.per_trial;
        std::sort(sorted.begin(), sorted.end());
        // Least squares a: quantile of delta at level 1 - e^{-u^2}/2 against (w + u rad), u in [0, 1].
        double num = 0.0;
        double den = 0.0;
        for (int step = 0; step <= 10; ++step) {
            const double u = step / 10.0;
            const double h = width.value + u * rad;
            const double q = stats::nearest_rank(sorted, 1.0 - 0.5 * std::exp(-u * u));
            num += q * h;
            den += h * h;
        }
        const double a = den > 0.0 ? num / den : 0.0;
        Row row{to_string(c.kind), integer(m), integer(n), integer(c.trials), width.value, rad, a};
        for (int u = 1; u <= 3; ++u) {
            const double level = a * (width.value + u * rad);
            const auto over = std::count_if(report.per_trial.begin(), report.per_trial.end(),
                                            [&](double d) { return d > level; });
            row.emplace_back(static_cast<double>(over) / static_cast<double>(c.trials));
            row.emplace_back(3.0 * std::exp(-static_cast<double>(u * u)));
        }
        r.rows.push_back(std::move(row));
        if (c.retain_trials) {
            r.trial_data.push_back(report.per_trial);
        }
    }
}

inline void run_conjecture_diag(const ExperimentConfig& c, ExperimentReport& r) {
    r.columns = {"kind", "m", "s", "n", "trials", "mean_diag_delta", "stderr_diag_delta", "complexity",
                 "complexity_stderr"};
    const auto all = cells(c);
    for (std::size_t idx = 0; idx < all.size(); ++idx) {
        const auto [m, s, n] = all[idx];
        const std::uint64_t cell_seed = derive_seed(c.seed, idx);
        const auto spec = EnsembleSpec::approx_sparse(m, n, s);
        const auto t = build_set(SetKind::PairDifferences, {.n = n});
        std::vector<double> deltas(c.trials);
        parallel::for_each_index(c.trials, [&](std::size_t i) {
            const auto a = sample_matrix(spec, {derive_seed(cell_seed, ArmApprox), i, 0});
            const auto d = column_norms(a);
            const auto images = image_norms(t, a);
            double worst = 0.0;
            for (std::size_t p = 0; p < images.size(); ++p) {
                double dx = 0.0;
                for (const auto& [j, v] : t.sparse_points()[p]) {
                    dx += d[j] * d[j] * v * v;
                }
                worst = std::max(worst, std::abs(images[p] - std::sqrt(dx)));
            }
            deltas[i] = worst;
        });
        const auto gamma = difference_set_complexity(n, c.mc_samples, derive_seed(cell_seed, ArmWidth));
        r.rows.push_back({to_string(c.kind), integer(m), integer(s), integer(n), integer(c.trials), stats::mean(deltas),
                          stats::standard_error(deltas), gamma.value, gamma.std_error});
        if (c.retain_trials) {
            r.trial_data.push_back(deltas);
        }
    }
}

}  // namespace detail

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport r;
    r.config = config;
    r.provenance = {std::string("subemb ") + kVersion, config.seed};
    switch (config.kind) {
        case Kind::Divergence: detail::run_divergence(config, r); break;
        case Kind::LowerBoundExactSparse: detail::run_lower_bound(config, r); break;
        case Kind::Normalization: detail::run_normalization(config, r); break;
        case Kind::Psi2Scaling: detail::run_psi2_scaling(config, r); break;
        case Kind::TailProfile: detail::run_tail_profile(config, r); break;
        case Kind::ConjectureDiag: detail::run_conjecture_diag(config, r); break;
    }
    return r;
}

enum class Format { Csv, Json };

inline std::string format_value(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        return std::to_string(*i);
    }
    if (const auto* d = std::get_if<double>(&v)) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        return buf;
    }
    if (const auto* s = std::get_if<std::string>(&v)) {
        return *s;
    }
    return "";
}

/// Header row plus one row per cell, columns in report order.
inline std::string to_csv(const ExperimentReport& r) {
    std::string out;
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        out += (i == 0 ? "" : ",") + r.columns[i];
    }
    out += "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += (i == 0 ? "" : ",") + format_value(row[i]);
        }
        out += "\n";
    }
    return out;
}

/// Splits CSV text into cells (no quoting: report values never contain commas).
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        out.push_back(std::move(cells));
    }
    return out;
}

inline nlohmann::json to_json(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) {
        return *i;
    }
    if (const auto* d = std::get_if<double>(&v)) {
        return *d;
    }
    if (const auto* s = std::get_if<std::string>(&v)) {
        return *s;
    }
    return nullptr;
}

/// Every DistortionReport field; per_trial only when retained.
inline nlohmann::json to_json(const DistortionReport& r) {
    nlohmann::json j{{"variant", to_string(r.spec.variant)},
                     {"m", r.spec.m},
                     {"n", r.spec.n},
                     {"s", r.spec.s},
                     {"set", r.set_id},
                     {"lambda", r.lambda},
                     {"trials", r.trials},
                     {"mean", r.mean},
                     {"std_error", r.std_error},
                     {"min", r.min},
                     {"max", r.max},
                     {"q50", r.q50},
                     {"q90", r.q90},
                     {"q99", r.q99},
                     {"lower_bound", r.lower_bound}};
    if (r.spec.variant == Variant::ColumnNormalized) {
        j["target_norm"] = r.spec.target_norm;
        j["min_norm_fraction"] = r.spec.min_norm_fraction;
        j["base"] = to_string(r.spec.base->variant);
    }
    if (!r.per_trial.empty()) {
        j["per_trial"] = r.per_trial;
    }
    return j;
}

inline Value value_from_json(const nlohmann::json& j) {
    if (j.is_null()) {
        return std::monostate{};
    }
    if (j.is_number_integer()) {
        return j.get<std::int64_t>();
    }
    if (j.is_number_float()) {
        return j.get<double>();
    }
    if (j.is_string()) {
        return j.get<std::string>();
    }
    throw ConfigError("unsupported report cell " + j.dump());
}

inline nlohmann::json to_json(const ExperimentReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& v : row) {
            cells.push_back(to_json(v));
        }
        rows.push_back(std::move(cells));
    }
    nlohmann::json j{{"config", to_json(r.config)},
                     {"columns", r.columns},
                     {"rows", std::move(rows)},
                     {"provenance", {{"version", r.provenance.version}, {"seed", r.provenance.seed}}}};
    if (!r.trial_data.empty()) {
        j["trial_data"] = r.trial_data;
    }
    return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
    try {
        ExperimentReport r;
        r.config = config_from_json(j.at("config"));
        r.columns = j.at("columns").get<std::vector<std::string>>();
        for (const auto& row : j.at("rows")) {
            Row values;
            for (const auto& cell : row) {
                values.push_back(value_from_json(cell));
            }
            r.rows.push_back(std::move(values));
        }
        if (j.contains("trial_data")) {
            r.trial_data = j.at("trial_data").get<std::vector<std::vector<double>>>();
        }
        r.provenance.version = j.at("provenance").at("version").get<std::string>();
        r.provenance.seed = j.at("provenance").at("seed").get<std::uint64_t>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report JSON: ") + e.what());
    }
}

inline Format format_for_path(const std::string& path) {
    return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0 ? Format::Json : Format::Csv;
}

inline void emit_report(const ExperimentReport& r, Format format, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << (format == Format::Csv ? to_csv(r) : to_json(r).dump(2) + "\n");
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

}  // namespace subemb::experiments
