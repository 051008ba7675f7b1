#pragma once

// Random matrix ensembles with independent columns.
//
// Sparse columns are stored as sorted (row, sign) lists times a common
// scale, so an exactly s-sparse column has norm sqrt(s) by construction and
// a normalized sparse column keeps its support.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <type_traits>
#include <variant>
#include <vector>

#include "subemb/error.hpp"
#include "subemb/random.hpp"

namespace subemb {

enum class Variant {
    DenseGaussian,
    DenseRademacherScaled,
    ApproxSparse,
    ExactSparse,
    ColumnNormalized,
};

/// Sampling route for ApproxSparse. Both routes draw from the same law.
enum class ApproxSparsePath {
    Auto,      // Skip when s/m < 0.1, otherwise PerEntry
    PerEntry,  // one uniform per entry
    Skip,      // geometric gaps between nonzeros
};

inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::DenseGaussian: return "dense_gaussian";
        case Variant::DenseRademacherScaled: return "dense_rademacher";
        case Variant::ApproxSparse: return "approx_sparse";
        case Variant::ExactSparse: return "exact_sparse";
        case Variant::ColumnNormalized: return "column_normalized";
    }
    return "unknown";
}

inline Variant variant_from_string(const std::string& name) {
    for (Variant v : {Variant::DenseGaussian, Variant::DenseRademacherScaled, Variant::ApproxSparse,
                      Variant::ExactSparse, Variant::ColumnNormalized}) {
        if (to_string(v) == name) {
            return v;
        }
    }
    throw ParameterError("unknown ensemble variant '" + name + "'");
}

inline bool is_sparse_variant(Variant v) {
    return v == Variant::ApproxSparse || v == Variant::ExactSparse;
}

/// Declarative description of a random m x n matrix distribution.
struct EnsembleSpec {
    Variant variant = Variant::DenseGaussian;
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t s = 0;               // sparse variants only
    double target_norm = 0.0;        // ColumnNormalized only
    double min_norm_fraction = 0.5;  // threshold fraction for the norm event
    std::shared_ptr<const EnsembleSpec> base;  // ColumnNormalized only
    std::size_t max_resamples = 1000;
    ApproxSparsePath approx_path = ApproxSparsePath::Auto;

    static EnsembleSpec make(Variant v, std::size_t m, std::size_t n, std::size_t s) {
        EnsembleSpec spec;
        spec.variant = v;
        spec.m = m;
        spec.n = n;
        spec.s = s;
        return spec;
    }
    static EnsembleSpec dense_gaussian(std::size_t m, std::size_t n) {
        return make(Variant::DenseGaussian, m, n, 0);
    }
    static EnsembleSpec dense_rademacher(std::size_t m, std::size_t n) {
        return make(Variant::DenseRademacherScaled, m, n, 0);
    }
    static EnsembleSpec approx_sparse(std::size_t m, std::size_t n, std::size_t s) {
        return make(Variant::ApproxSparse, m, n, s);
    }
    static EnsembleSpec exact_sparse(std::size_t m, std::size_t n, std::size_t s) {
        return make(Variant::ExactSparse, m, n, s);
    }
    static EnsembleSpec column_normalized(const EnsembleSpec& base, double target_norm,
                                          double min_norm_fraction = 0.5) {
        EnsembleSpec spec = make(Variant::ColumnNormalized, base.m, base.n, base.s);
        spec.target_norm = target_norm;
        spec.min_norm_fraction = min_norm_fraction;
        spec.base = std::make_shared<const EnsembleSpec>(base);
        return spec;
    }

    void validate() const {
        if (m == 0 || n == 0) {
            throw ParameterError("ensemble dimensions must be positive");
        }
        if (m > std::numeric_limits<std::uint32_t>::max()) {
            throw ParameterError("row count exceeds 32-bit row indices");
        }
        if (is_sparse_variant(variant) && (s < 1 || s > m)) {
            throw ParameterError("sparse ensembles require 1 <= s <= m");
        }
        if (!(min_norm_fraction > 0.0 && min_norm_fraction < 1.0)) {
            throw ParameterError("min_norm_fraction must lie in (0, 1)");
        }
        if (variant == Variant::ColumnNormalized) {
            if (!base) {
                throw ParameterError("column_normalized requires a base ensemble");
            }
            if (base->variant == Variant::ColumnNormalized) {
                throw ParameterError("column_normalized base must not itself be column_normalized");
            }
            if (!(target_norm > 0.0) || !std::isfinite(target_norm)) {
                throw ParameterError("column_normalized requires a positive target_norm");
            }
            if (base->m != m || base->n != n) {
                throw ParameterError("column_normalized base must share the outer dimensions");
            }
            base->validate();
        }
    }

    friend bool operator==(const EnsembleSpec& a, const EnsembleSpec& b) {
        const bool same_base = (!a.base && !b.base) || (a.base && b.base && *a.base == *b.base);
        return a.variant == b.variant && a.m == b.m && a.n == b.n && a.s == b.s &&
               a.target_norm == b.target_norm && a.min_norm_fraction == b.min_norm_fraction &&
               a.max_resamples == b.max_resamples && a.approx_path == b.approx_path && same_base;
    }
};

/// Centering constant each ensemble is compared against: 1 for dense,
/// sqrt(s) for sparse, target_norm for normalized.
inline double default_lambda(const EnsembleSpec& spec) {
    switch (spec.variant) {
        case Variant::DenseGaussian:
        case Variant::DenseRademacherScaled: return 1.0;
        case Variant::ApproxSparse:
        case Variant::ExactSparse: return std::sqrt(static_cast<double>(spec.s));
        case Variant::ColumnNormalized: return spec.target_norm;
    }
    return 1.0;
}

struct SparseEntry {
    std::uint32_t row = 0;
    std::int8_t sign = 1;

    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Column with values scale * sign at the listed rows.
struct SparseColumn {
    std::vector<SparseEntry> entries;
    double scale = 1.0;

    friend bool operator==(const SparseColumn&, const SparseColumn&) = default;
};

struct DenseColumn {
    std::vector<double> values;

    friend bool operator==(const DenseColumn&, const DenseColumn&) = default;
};

using Column = std::variant<SparseColumn, DenseColumn>;

inline double column_norm(const Column& column) {
    if (const auto* sp = std::get_if<SparseColumn>(&column)) {
        return std::abs(sp->scale) * std::sqrt(static_cast<double>(sp->entries.size()));
    }
    double acc = 0.0;
    for (double v : std::get<DenseColumn>(column).values) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

/// Multiplies a column by a scalar.
inline Column scaled(Column column, double factor) {
    std::visit(
        [factor](auto& col) {
            if constexpr (std::is_same_v<std::decay_t<decltype(col)>, SparseColumn>) {
                col.scale *= factor;
            } else {
                for (double& v : col.values) {
                    v *= factor;
                }
            }
        },
        column);
    return column;
}

/// Rescales a nonzero column to the given Euclidean norm.
inline Column rescale_column(Column column, double target_norm) {
    const double norm = column_norm(column);
    if (norm == 0.0) {
        throw DegenerateInput("cannot rescale a zero column");
    }
    return scaled(std::move(column), target_norm / norm);
}

inline double dot(const Column& a, const Column& b) {
    const auto* sa = std::get_if<SparseColumn>(&a);
    const auto* sb = std::get_if<SparseColumn>(&b);
    if (sa && sb) {
        long long acc = 0;
        auto ia = sa->entries.begin();
        auto ib = sb->entries.begin();
        while (ia != sa->entries.end() && ib != sb->entries.end()) {
            if (ia->row < ib->row) {
                ++ia;
            } else if (ib->row < ia->row) {
                ++ib;
            } else {
                acc += ia->sign * ib->sign;
                ++ia;
                ++ib;
            }
        }
        return sa->scale * sb->scale * static_cast<double>(acc);
    }
    if (sa || sb) {
        const SparseColumn& sp = sa ? *sa : *sb;
        const auto& dense = std::get<DenseColumn>(sa ? b : a).values;
        double acc = 0.0;
        for (const auto& e : sp.entries) {
            acc += e.sign * dense[e.row];
        }
        return sp.scale * acc;
    }
    const auto& da = std::get<DenseColumn>(a).values;
    const auto& db = std::get<DenseColumn>(b).values;
    double acc = 0.0;
    for (std::size_t i = 0; i < da.size(); ++i) {
        acc += da[i] * db[i];
    }
    return acc;
}

/// y += alpha * column.
inline void axpy(const Column& column, double alpha, std::span<double> y) {
    if (const auto* sp = std::get_if<SparseColumn>(&column)) {
        const double a = alpha * sp->scale;
        for (const auto& e : sp->entries) {
            y[e.row] += a * e.sign;
        }
        return;
    }
    const auto& values = std::get<DenseColumn>(column).values;
    for (std::size_t i = 0; i < values.size(); ++i) {
        y[i] += alpha * values[i];
    }
}

/// m x n matrix stored column by column. Immutable after construction.
class ColumnMatrix {
public:
    ColumnMatrix(std::size_t m, std::vector<Column> columns) : m_(m), columns_(std::move(columns)) {
        for (std::size_t j = 0; j < columns_.size(); ++j) {
            check_column(j);
        }
    }

    [[nodiscard]] std::size_t rows() const noexcept { return m_; }
    [[nodiscard]] std::size_t cols() const noexcept { return columns_.size(); }
    [[nodiscard]] const Column& column(std::size_t j) const { return columns_.at(j); }
    [[nodiscard]] const std::vector<Column>& columns() const noexcept { return columns_; }
    [[nodiscard]] bool is_sparse(std::size_t j) const {
        return std::holds_alternative<SparseColumn>(columns_.at(j));
    }

    friend bool operator==(const ColumnMatrix&, const ColumnMatrix&) = default;

private:
    void check_column(std::size_t j) const {
        if (const auto* sp = std::get_if<SparseColumn>(&columns_[j])) {
            for (std::size_t k = 0; k < sp->entries.size(); ++k) {
                const auto& e = sp->entries[k];
                if (e.row >= m_) {
                    throw ParameterError("column " + std::to_string(j) + ": row index out of range");
                }
                if (k > 0 && sp->entries[k - 1].row >= e.row) {
                    throw ParameterError("column " + std::to_string(j) +
                                         ": row indices must be strictly increasing");
                }
                if (e.sign != 1 && e.sign != -1) {
                    throw ParameterError("column " + std::to_string(j) + ": sign must be +1 or -1");
                }
            }
        } else if (std::get<DenseColumn>(columns_[j]).values.size() != m_) {
            throw DimensionMismatch("dense column " + std::to_string(j), m_,
                                    std::get<DenseColumn>(columns_[j]).values.size());
        }
    }

    std::size_t m_;
    std::vector<Column> columns_;
};

inline std::vector<double> column_norms(const ColumnMatrix& a) {
    std::vector<double> norms;
    norms.reserve(a.cols());
    for (const auto& c : a.columns()) {
        norms.push_back(column_norm(c));
    }
    return norms;
}

/// A x, accumulating only over nonzero x_j.
inline std::vector<double> matvec(const ColumnMatrix& a, std::span<const double> x) {
    if (x.size() != a.cols()) {
        throw DimensionMismatch("matvec", a.cols(), x.size());
    }
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] != 0.0) {
            axpy(a.column(j), x[j], y);
        }
    }
    return y;
}

/// Same supports, every sign flipped.
inline ColumnMatrix negated(const ColumnMatrix& a) {
    std::vector<Column> cols;
    cols.reserve(a.cols());
    for (const auto& c : a.columns()) {
        if (const auto* sp = std::get_if<SparseColumn>(&c)) {
            SparseColumn flipped = *sp;
            for (auto& e : flipped.entries) {
                e.sign = static_cast<std::int8_t>(-e.sign);
            }
            cols.emplace_back(std::move(flipped));
        } else {
            cols.push_back(scaled(c, -1.0));
        }
    }
    return ColumnMatrix(a.rows(), std::move(cols));
}

namespace detail {

inline SparseColumn sample_approx_sparse(std::size_t m, std::size_t s, ApproxSparsePath path,
                                         Stream& stream) {
    const double p = static_cast<double>(s) / static_cast<double>(m);
    if (path == ApproxSparsePath::Auto) {
        path = p < 0.1 ? ApproxSparsePath::Skip : ApproxSparsePath::PerEntry;
    }
    SparseColumn col;
    if (path == ApproxSparsePath::PerEntry) {
        const double half = 0.5 * p;
        for (std::size_t i = 0; i < m; ++i) {
            const double u = stream.uniform();
            if (u < half) {
                col.entries.push_back({static_cast<std::uint32_t>(i), 1});
            } else if (u < p) {
                col.entries.push_back({static_cast<std::uint32_t>(i), -1});
            }
        }
        return col;
    }
    std::uint64_t pos = stream.geometric_gap(p);
    while (pos < m) {
        col.entries.push_back({static_cast<std::uint32_t>(pos), static_cast<std::int8_t>(stream.sign())});
        const std::uint64_t gap = stream.geometric_gap(p);
        if (gap >= m) {
            break;
        }
        pos += 1 + gap;
    }
    return col;
}

/// Uniform s-subset of [0, m) by a partial Fisher-Yates shuffle over an
/// explicit index pool. Returned in draw order.
inline std::vector<std::uint32_t> subset_explicit_pool(std::size_t m, std::size_t s, Stream& stream) {
    std::vector<std::uint32_t> pool(m);
    std::iota(pool.begin(), pool.end(), 0u);
    std::vector<std::uint32_t> chosen(s);
    for (std::size_t i = 0; i < s; ++i) {
        const std::size_t j = i + stream.bounded(m - i);
        std::swap(pool[i], pool[j]);
        chosen[i] = pool[i];
    }
    return chosen;
}

/// The same shuffle with a virtual pool: only displaced slots are stored, so
/// the cost is O(s^2) instead of O(m). Consumes the stream identically.
inline std::vector<std::uint32_t> subset_virtual_pool(std::size_t m, std::size_t s, Stream& stream) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> displaced;  // slot -> value
    displaced.reserve(2 * s);
    auto value_at = [&](std::uint32_t slot) {
        for (const auto& [k, v] : displaced) {
            if (k == slot) {
                return v;
            }
        }
        return slot;
    };
    auto store = [&](std::uint32_t slot, std::uint32_t value) {
        for (auto& [k, v] : displaced) {
            if (k == slot) {
                v = value;
                return;
            }
        }
        displaced.emplace_back(slot, value);
    };
    std::vector<std::uint32_t> chosen(s);
    for (std::size_t i = 0; i < s; ++i) {
        const auto slot_i = static_cast<std::uint32_t>(i);
        const auto slot_j = static_cast<std::uint32_t>(i + stream.bounded(m - i));
        const std::uint32_t vi = value_at(slot_i);
        const std::uint32_t vj = value_at(slot_j);
        store(slot_j, vi);
        store(slot_i, vj);
        chosen[i] = vj;
    }
    return chosen;
}

/// Sorted uniform s-subset of [0, m).
inline std::vector<std::uint32_t> uniform_subset(std::size_t m, std::size_t s, Stream& stream) {
    auto chosen = (m <= 4096 || 8 * s >= m) ? subset_explicit_pool(m, s, stream) : subset_virtual_pool(m, s, stream);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

inline SparseColumn sample_exact_sparse(std::size_t m, std::size_t s, Stream& stream) {
    SparseColumn col;
    col.entries.reserve(s);
    for (std::uint32_t row : uniform_subset(m, s, stream)) {
        col.entries.push_back({row, static_cast<std::int8_t>(stream.sign())});
    }
    return col;
}

/// One column of a non-normalized ensemble.
inline Column sample_base_column(const EnsembleSpec& spec, Stream& stream) {
    const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(spec.m));
    switch (spec.variant) {
        case Variant::DenseGaussian: {
            DenseColumn col{std::vector<double>(spec.m)};
            for (double& v : col.values) {
                v = stream.normal() * inv_sqrt_m;
            }
            return col;
        }
        case Variant::DenseRademacherScaled: {
            DenseColumn col{std::vector<double>(spec.m)};
            for (double& v : col.values) {
                v = stream.sign() * inv_sqrt_m;
            }
            return col;
        }
        case Variant::ApproxSparse: return sample_approx_sparse(spec.m, spec.s, spec.approx_path, stream);
        case Variant::ExactSparse: return sample_exact_sparse(spec.m, spec.s, stream);
        case Variant::ColumnNormalized: break;
    }
    throw ParameterError("sample_base_column called with a normalized ensemble");
}

}  // namespace detail

/// Column-normalized sample together with the number of rejected draws per column.
struct NormalizedSample {
    ColumnMatrix matrix;
    std::vector<std::size_t> resample_counts;
};

/// Draws each base column until its norm reaches min_norm_fraction * target_norm,
/// then rescales it to target_norm exactly. Column j is drawn from the stream
/// at (seed.master_seed, seed.trial_index, seed.column_index + j), so the first
/// attempt coincides with the unnormalized base draw under the same seed.
inline NormalizedSample normalize_columns_conditional(const EnsembleSpec& spec, const SeedPath& seed) {
    spec.validate();
    if (spec.variant != Variant::ColumnNormalized) {
        throw ParameterError("normalize_columns_conditional requires a column_normalized ensemble");
    }
    const double threshold = spec.min_norm_fraction * spec.target_norm;
    std::vector<Column> cols;
    cols.reserve(spec.n);
    std::vector<std::size_t> resamples(spec.n, 0);
    for (std::size_t j = 0; j < spec.n; ++j) {
        Stream stream({seed.master_seed, seed.trial_index, seed.column_index + j});
        for (;;) {
            Column col = detail::sample_base_column(*spec.base, stream);
            const double norm = column_norm(col);
            if (norm > 0.0 && norm >= threshold) {
                cols.push_back(scaled(std::move(col), spec.target_norm / norm));
                break;
            }
            if (resamples[j] == spec.max_resamples) {
                throw ResampleExhausted(j, resamples[j] + 1);
            }
            ++resamples[j];
        }
    }
    return {ColumnMatrix(spec.m, std::move(cols)), std::move(resamples)};
}

/// Samples one matrix. Columns are independent: column j depends only on the
/// stream (seed.master_seed, seed.trial_index, seed.column_index + j).
inline ColumnMatrix sample_matrix(const EnsembleSpec& spec, const SeedPath& seed) {
    spec.validate();
    if (spec.variant == Variant::ColumnNormalized) {
        return normalize_columns_conditional(spec, seed).matrix;
    }
    std::vector<Column> cols;
    cols.reserve(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) {
        Stream stream({seed.master_seed, seed.trial_index, seed.column_index + j});
        cols.push_back(detail::sample_base_column(spec, stream));
    }
    return ColumnMatrix(spec.m, std::move(cols));
}

}  // namespace subemb
