#pragma once

// Test sets T in R^n and the two sup-oracles estimators need:
//   sup_linear     sup_{x in T} <g, x>   (or |<g, x>|)
//   distortion_sup sup_{x in T} | ||Ax|| - lambda ||x|| |

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "subemb/ensembles.hpp"
#include "subemb/error.hpp"
#include "subemb/random.hpp"

namespace subemb {

using Vector = std::vector<double>;

/// Nonzero coordinates of a vector, increasing index.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

inline SparseVector to_sparse(std::span<const double> x) {
    SparseVector out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) {
            out.emplace_back(i, x[i]);
        }
    }
    return out;
}

inline double norm2(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) {
        acc += v * v;
    }
    return std::sqrt(acc);
}

inline double inner(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

enum class SetKind {
    Singleton,        // {e1}
    Basis,            // {e1, ..., en}
    Difference,       // {e1 - ei : i = 2..n}
    PairDifferences,  // {(ei - ej)/sqrt2 : i < j}
    KSparse,          // unit vectors with at most k nonzeros
    Subspace,         // unit ball of a random d-dimensional subspace
    SphereSample,     // count random points of the unit sphere
};

inline std::string to_string(SetKind kind) {
    switch (kind) {
        case SetKind::Singleton: return "singleton";
        case SetKind::Basis: return "basis";
        case SetKind::Difference: return "difference";
        case SetKind::PairDifferences: return "pair_differences";
        case SetKind::KSparse: return "k_sparse";
        case SetKind::Subspace: return "subspace";
        case SetKind::SphereSample: return "sphere_sample";
    }
    return "unknown";
}

inline SetKind set_kind_from_string(const std::string& name) {
    for (SetKind k : {SetKind::Singleton, SetKind::Basis, SetKind::Difference, SetKind::PairDifferences,
                      SetKind::KSparse, SetKind::Subspace, SetKind::SphereSample}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ParameterError("unknown test set kind '" + name + "'");
}

struct SetParams {
    std::size_t n = 0;
    std::size_t k = 1;      // KSparse
    std::size_t d = 1;      // Subspace
    std::size_t count = 1;  // SphereSample
    std::uint64_t seed = 0;  // Subspace, SphereSample
};

class TestSet {
public:
    struct Finite {
        std::vector<Vector> points;
    };
    struct KSparseUnit {
        std::size_t k = 1;
    };
    struct SubspaceBall {
        Eigen::MatrixXd basis;  // n x d, orthonormal columns
    };
    struct SphereSample {
        std::size_t count = 0;
        std::uint64_t seed = 0;
        std::vector<Vector> points;
    };
    using Shape = std::variant<Finite, KSparseUnit, SubspaceBall, SphereSample>;

    static TestSet finite(std::size_t n, std::vector<Vector> points, std::string id = "finite") {
        if (points.empty()) {
            throw ParameterError("a finite test set needs at least one vector");
        }
        for (const auto& p : points) {
            if (p.size() != n) {
                throw DimensionMismatch("finite test set vector", n, p.size());
            }
        }
        return TestSet(n, std::move(id), Finite{std::move(points)});
    }

    static TestSet k_sparse(std::size_t n, std::size_t k) {
        if (k < 1 || k > n) {
            throw ParameterError("k_sparse requires 1 <= k <= n");
        }
        return TestSet(n, "k_sparse(n=" + std::to_string(n) + ",k=" + std::to_string(k) + ")",
                       KSparseUnit{k});
    }

    static TestSet subspace(Eigen::MatrixXd basis, std::string id = "subspace") {
        const auto n = static_cast<std::size_t>(basis.rows());
        if (n == 0 || basis.cols() == 0 || basis.cols() > basis.rows()) {
            throw ParameterError("subspace basis must be n x d with 1 <= d <= n");
        }
        const Eigen::MatrixXd gram = basis.transpose() * basis;
        const double err = (gram - Eigen::MatrixXd::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
        if (err > 1e-10) {
            throw ParameterError("subspace basis columns are not orthonormal");
        }
        return TestSet(n, std::move(id), SubspaceBall{std::move(basis)});
    }

    static TestSet sphere_sample(std::size_t n, std::size_t count, std::uint64_t seed) {
        if (n == 0 || count == 0) {
            throw ParameterError("sphere_sample requires n >= 1 and count >= 1");
        }
        std::vector<Vector> points;
        points.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            Stream stream({seed, i, 0}, StreamDomain::TestSet);
            Vector p(n);
            double nrm = 0.0;
            do {
                for (double& v : p) {
                    v = stream.normal();
                }
                nrm = norm2(p);
            } while (nrm == 0.0);
            for (double& v : p) {
                v /= nrm;
            }
            points.push_back(std::move(p));
        }
        return TestSet(n,
                       "sphere_sample(n=" + std::to_string(n) + ",count=" + std::to_string(count) +
                           ",seed=" + std::to_string(seed) + ")",
                       SphereSample{count, seed, std::move(points)});
    }

    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }

    /// True when T is given by an explicit list of points (Finite or SphereSample).
    [[nodiscard]] bool has_points() const noexcept {
        return std::holds_alternative<Finite>(shape_) || std::holds_alternative<SphereSample>(shape_);
    }

    [[nodiscard]] const std::vector<Vector>& points() const {
        if (const auto* f = std::get_if<Finite>(&shape_)) {
            return f->points;
        }
        if (const auto* s = std::get_if<SphereSample>(&shape_)) {
            return s->points;
        }
        throw ParameterError("test set '" + id_ + "' has no explicit point list");
    }

    /// Nonzero pattern of points(), same order.
    [[nodiscard]] const std::vector<SparseVector>& sparse_points() const {
        if (!has_points()) {
            throw ParameterError("test set '" + id_ + "' has no explicit point list");
        }
        return sparse_points_;
    }

private:
    TestSet(std::size_t n, std::string id, Shape shape) : n_(n), id_(std::move(id)), shape_(std::move(shape)) {
        if (n_ == 0) {
            throw ParameterError("test set dimension must be positive");
        }
        if (has_points()) {
            for (const auto& p : points()) {
                sparse_points_.push_back(to_sparse(p));
            }
        }
    }

    std::size_t n_;
    std::string id_;
    Shape shape_;
    std::vector<SparseVector> sparse_points_;
};

inline Vector unit_vector(std::size_t n, std::size_t i) {
    Vector e(n, 0.0);
    e.at(i) = 1.0;
    return e;
}

/// Builds one of the named test sets.
inline TestSet build_set(SetKind kind, const SetParams& p) {
    const std::size_t n = p.n;
    if (n == 0) {
        throw ParameterError("test set dimension must be positive");
    }
    const std::string dims = "(n=" + std::to_string(n) + ")";
    switch (kind) {
        case SetKind::Singleton: return TestSet::finite(n, {unit_vector(n, 0)}, "singleton" + dims);
        case SetKind::Basis: {
            std::vector<Vector> pts;
            for (std::size_t i = 0; i < n; ++i) {
                pts.push_back(unit_vector(n, i));
            }
            return TestSet::finite(n, std::move(pts), "basis" + dims);
        }
        case SetKind::Difference: {
            if (n < 2) {
                throw ParameterError("difference set requires n >= 2");
            }
            std::vector<Vector> pts;
            pts.reserve(n - 1);
            for (std::size_t i = 1; i < n; ++i) {
                Vector x(n, 0.0);
                x[0] = 1.0;
                x[i] = -1.0;
                pts.push_back(std::move(x));
            }
            return TestSet::finite(n, std::move(pts), "difference" + dims);
        }
        case SetKind::PairDifferences: {
            if (n < 2) {
                throw ParameterError("pair_differences requires n >= 2");
            }
            const double h = 1.0 / std::sqrt(2.0);
            std::vector<Vector> pts;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    Vector x(n, 0.0);
                    x[i] = h;
                    x[j] = -h;
                    pts.push_back(std::move(x));
                }
            }
            return TestSet::finite(n, std::move(pts), "pair_differences" + dims);
        }
        case SetKind::KSparse: return TestSet::k_sparse(n, p.k);
        case SetKind::Subspace: {
            if (p.d < 1 || p.d > n) {
                throw ParameterError("subspace requires 1 <= d <= n");
            }
            Eigen::MatrixXd g(n, p.d);
            for (std::size_t c = 0; c < p.d; ++c) {
                Stream stream({p.seed, c, 0}, StreamDomain::TestSet);
                for (std::size_t r = 0; r < n; ++r) {
                    g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = stream.normal();
                }
            }
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
            Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
            return TestSet::subspace(std::move(q), "subspace(n=" + std::to_string(n) + ",d=" +
                                                       std::to_string(p.d) + ",seed=" + std::to_string(p.seed) + ")");
        }
        case SetKind::SphereSample: return TestSet::sphere_sample(n, p.count, p.seed);
    }
    throw ParameterError("unknown test set kind");
}

/// c * T for a point-list set.
inline TestSet scaled_set(const TestSet& t, double c) {
    std::vector<Vector> pts = t.points();
    for (auto& p : pts) {
        for (double& v : p) {
            v *= c;
        }
    }
    return TestSet::finite(t.dim(), std::move(pts), t.id() + "*" + std::to_string(c));
}

/// T union (-T) for a point-list set: the original points followed by their negatives.
inline TestSet symmetrized(const TestSet& t) {
    std::vector<Vector> pts = t.points();
    for (const auto& p : t.points()) {
        Vector q = p;
        for (double& v : q) {
            v = -v;
        }
        pts.push_back(std::move(q));
    }
    return TestSet::finite(t.dim(), std::move(pts), "sym(" + t.id() + ")");
}

struct LinearSup {
    double value = 0.0;
    Vector witness;
};

namespace detail {

inline double sparse_dot(const SparseVector& x, std::span<const double> g) {
    double acc = 0.0;
    for (const auto& [i, v] : x) {
        acc += v * g[i];
    }
    return acc;
}

inline LinearSup sup_over_points(const TestSet& t, std::span<const double> g, bool signed_sup) {
    const auto& sparse = t.sparse_points();
    std::size_t best = 0;
    double best_value = 0.0;
    for (std::size_t i = 0; i < sparse.size(); ++i) {
        double v = sparse_dot(sparse[i], g);
        if (signed_sup) {
            v = std::abs(v);
        }
        if (i == 0 || v > best_value) {
            best = i;
            best_value = v;
        }
    }
    return {best_value, t.points()[best]};
}

}  // namespace detail

/// sup_{x in T} <g, x> (signed_sup = false) or sup_{x in T} |<g, x>| (signed_sup = true)
/// with an attaining x. Ties go to the lowest index.
inline LinearSup sup_linear(const TestSet& t, std::span<const double> g, bool signed_sup) {
    if (g.size() != t.dim()) {
        throw DimensionMismatch("sup_linear", t.dim(), g.size());
    }
    if (t.has_points()) {
        return detail::sup_over_points(t, g, signed_sup);
    }
    if (const auto* ks = std::get_if<TestSet::KSparseUnit>(&t.shape())) {
        // Symmetric set: both sups equal the norm of the k largest-magnitude entries.
        std::vector<std::size_t> order(g.size());
        std::iota(order.begin(), order.end(), 0);
        const auto k = static_cast<std::ptrdiff_t>(ks->k);
        std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](std::size_t a, std::size_t b) {
            const double ma = std::abs(g[a]);
            const double mb = std::abs(g[b]);
            return ma != mb ? ma > mb : a < b;
        });
        double acc = 0.0;
        for (std::ptrdiff_t i = 0; i < k; ++i) {
            acc += g[order[i]] * g[order[i]];
        }
        const double value = std::sqrt(acc);
        Vector witness(g.size(), 0.0);
        if (value == 0.0) {
            witness[order[0]] = 1.0;
        } else {
            for (std::ptrdiff_t i = 0; i < k; ++i) {
                witness[order[i]] = g[order[i]] / value;
            }
        }
        return {value, std::move(witness)};
    }
    const auto& basis = std::get<TestSet::SubspaceBall>(t.shape()).basis;
    const Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(g.size()));
    const Eigen::VectorXd coeff = basis.transpose() * gv;
    const double value = coeff.norm();
    Eigen::VectorXd w = value > 0.0 ? Eigen::VectorXd(basis * (coeff / value)) : Eigen::VectorXd(basis.col(0));
    return {value, Vector(w.data(), w.data() + w.size())};
}

struct Distortion {
    double delta = 0.0;
    Vector witness;
    bool lower_bound = false;  // true when delta is a sampled lower bound on the sup
};

/// Evaluates ||A x|| for sparse x, reusing one scratch buffer of length m.
class ImageNorm {
public:
    explicit ImageNorm(const ColumnMatrix& a) : a_(a), buffer_(a.rows(), 0.0) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            all_sparse_ = all_sparse_ && a.is_sparse(j);
        }
    }

    double operator()(const SparseVector& x) {
        if (!all_sparse_) {
            std::fill(buffer_.begin(), buffer_.end(), 0.0);
            for (const auto& [j, v] : x) {
                axpy(a_.column(j), v, buffer_);
            }
            return norm2(buffer_);
        }
        touched_.clear();
        for (const auto& [j, v] : x) {
            const auto& col = std::get<SparseColumn>(a_.column(j));
            const double w = v * col.scale;
            for (const auto& e : col.entries) {
                buffer_[e.row] += w * e.sign;
                touched_.push_back(e.row);
            }
        }
        double acc = 0.0;
        for (std::uint32_t r : touched_) {
            acc += buffer_[r] * buffer_[r];
            buffer_[r] = 0.0;
        }
        return std::sqrt(acc);
    }

private:
    const ColumnMatrix& a_;
    std::vector<double> buffer_;
    std::vector<std::uint32_t> touched_;
    bool all_sparse_ = true;
};

/// ||A x|| for every point of a point-list set, in order.
inline std::vector<double> image_norms(const TestSet& t, const ColumnMatrix& a) {
    if (a.cols() != t.dim()) {
        throw DimensionMismatch("image_norms", t.dim(), a.cols());
    }
    ImageNorm eval(a);
    std::vector<double> out;
    out.reserve(t.sparse_points().size());
    for (const auto& x : t.sparse_points()) {
        out.push_back(eval(x));
    }
    return out;
}

namespace detail {

/// Extreme singular values of the m x k matrix with the given columns, with
/// the right singular vectors (coefficients in the column basis).
struct ExtremeSpectrum {
    double sigma_max = 0.0;
    double sigma_min = 0.0;
    Eigen::VectorXd v_max;
    Eigen::VectorXd v_min;
};

inline ExtremeSpectrum extreme_spectrum(const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const Eigen::Index k = m.cols();
    ExtremeSpectrum out;
    out.sigma_max = sv(0);
    out.v_max = svd.matrixV().col(0);
    // With more columns than rows the kernel is nontrivial: sigma_min = 0.
    out.sigma_min = k > m.rows() ? 0.0 : sv(k - 1);
    out.v_min = svd.matrixV().col(k - 1);
    return out;
}

inline Eigen::VectorXd dense_column(const ColumnMatrix& a, std::size_t j) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(a.rows()));
    std::span<double> view(out.data(), static_cast<std::size_t>(out.size()));
    axpy(a.column(j), 1.0, view);
    return out;
}

inline void distortion_from_spectrum(const ExtremeSpectrum& sp, double lambda, Distortion& best,
                                     const std::function<Vector(const Eigen::VectorXd&)>& lift) {
    const double upper = sp.sigma_max - lambda;
    const double lower = lambda - sp.sigma_min;
    const double delta = std::max(upper, lower);
    if (best.witness.empty() || delta > best.delta) {
        best.delta = delta;
        best.witness = lift(upper >= lower ? sp.v_max : sp.v_min);
    }
}

}  // namespace detail

/// Number of k-subsets of an n-set the k-sparse oracle will enumerate exactly.
inline constexpr double kSupportEnumerationBudget = 200000.0;

/// sup_{x in T} | ||Ax|| - lambda ||x|| | with a witness.
///  - point lists: every element is evaluated; exact for Finite, lower bound for SphereSample;
///  - SubspaceBall: exact, max(sigma_max - lambda, lambda - sigma_min) of A B;
///  - KSparseUnit: exact over all supports when C(n, k) fits the enumeration
///    budget, otherwise a lower bound over random supports.
inline Distortion distortion_sup(const TestSet& t, const ColumnMatrix& a, double lambda) {
    if (a.cols() != t.dim()) {
        throw DimensionMismatch("distortion_sup", t.dim(), a.cols());
    }
    if (t.has_points()) {
        const auto norms = image_norms(t, a);
        const auto& pts = t.sparse_points();
        std::size_t best = 0;
        double best_delta = 0.0;
        for (std::size_t i = 0; i < norms.size(); ++i) {
            double xn = 0.0;
            for (const auto& [j, v] : pts[i]) {
                xn += v * v;
            }
            const double d = std::abs(norms[i] - lambda * std::sqrt(xn));
            if (i == 0 || d > best_delta) {
                best = i;
                best_delta = d;
            }
        }
        return {best_delta, t.points()[best], std::holds_alternative<TestSet::SphereSample>(t.shape())};
    }
    Distortion out;
    if (const auto* sb = std::get_if<TestSet::SubspaceBall>(&t.shape())) {
        const Eigen::MatrixXd& basis = sb->basis;
        Eigen::MatrixXd ab(static_cast<Eigen::Index>(a.rows()), basis.cols());
        for (Eigen::Index c = 0; c < basis.cols(); ++c) {
            const Eigen::VectorXd bc = basis.col(c);
            const auto y = matvec(a, std::span<const double>(bc.data(), static_cast<std::size_t>(bc.size())));
            ab.col(c) = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
        }
        detail::distortion_from_spectrum(detail::extreme_spectrum(ab), lambda, out, [&](const Eigen::VectorXd& v) {
            const Eigen::VectorXd x = basis * v;
            return Vector(x.data(), x.data() + x.size());
        });
        return out;
    }
    const std::size_t n = t.dim();
    const std::size_t k = std::get<TestSet::KSparseUnit>(t.shape()).k;
    double supports = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        supports = supports * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    std::vector<Eigen::VectorXd> dense(n);
    for (std::size_t j = 0; j < n; ++j) {
        dense[j] = detail::dense_column(a, j);
    }
    auto evaluate = [&](const std::vector<std::size_t>& support) {
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(support.size()));
        for (std::size_t c = 0; c < support.size(); ++c) {
            sub.col(static_cast<Eigen::Index>(c)) = dense[support[c]];
        }
        detail::distortion_from_spectrum(detail::extreme_spectrum(sub), lambda, out, [&](const Eigen::VectorXd& v) {
            Vector x(n, 0.0);
            for (std::size_t c = 0; c < support.size(); ++c) {
                x[support[c]] = v(static_cast<Eigen::Index>(c));
            }
            return x;
        });
    };
    if (supports <= kSupportEnumerationBudget) {
        std::vector<std::size_t> support(k);
        std::iota(support.begin(), support.end(), 0);
        for (;;) {
            evaluate(support);
            std::size_t i = k;
            while (i > 0 && support[i - 1] == n - k + (i - 1)) {
                --i;
            }
            if (i == 0) {
                break;
            }
            ++support[i - 1];
            for (std::size_t j = i; j < k; ++j) {
                support[j] = support[j - 1] + 1;
            }
        }
        out.lower_bound = false;
        return out;
    }
    Stream stream({0x5eed, 0, 0}, StreamDomain::TestSet);
    for (std::size_t trial = 0; trial < static_cast<std::size_t>(kSupportEnumerationBudget) / 100; ++trial) {
        auto rows = detail::uniform_subset(n, k, stream);
        evaluate(std::vector<std::size_t>(rows.begin(), rows.end()));
    }
    out.lower_bound = true;
    return out;
}

/// rad(T) = sup ||x||, diam(T) = sup ||x - y||.
inline std::pair<double, double> rad_diam(const TestSet& t) {
    if (!t.has_points()) {
        return {1.0, 2.0};  // unit k-sparse vectors and subspace balls contain x and -x
    }
    const auto& pts = t.sparse_points();
    double rad2 = 0.0;
    double diam2 = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double xn = 0.0;
        for (const auto& [j, v] : pts[i]) {
            xn += v * v;
        }
        rad2 = std::max(rad2, xn);
        for (std::size_t q = i + 1; q < pts.size(); ++q) {
            double acc = 0.0;
            auto a = pts[i].begin();
            auto b = pts[q].begin();
            while (a != pts[i].end() || b != pts[q].end()) {
                double d = 0.0;
                if (b == pts[q].end() || (a != pts[i].end() && a->first < b->first)) {
                    d = a->second;
                    ++a;
                } else if (a == pts[i].end() || b->first < a->first) {
                    d = -b->second;
                    ++b;
                } else {
                    d = a->second - b->second;
                    ++a;
                    ++b;
                }
                acc += d * d;
            }
            diam2 = std::max(diam2, acc);
        }
    }
    return {std::sqrt(rad2), std::sqrt(diam2)};
}

/// Membership test used to validate witnesses.
inline bool contains(const TestSet& t, std::span<const double> x, double tol = 1e-10) {
    if (x.size() != t.dim()) {
        return false;
    }
    if (t.has_points()) {
        for (const auto& p : t.points()) {
            double err = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) {
                err = std::max(err, std::abs(p[i] - x[i]));
            }
            if (err <= tol) {
                return true;
            }
        }
        return false;
    }
    if (const auto* ks = std::get_if<TestSet::KSparseUnit>(&t.shape())) {
        const auto nnz = static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [](double v) { return v != 0.0; }));
        return nnz <= ks->k && std::abs(norm2(x) - 1.0) <= tol;
    }
    const auto& basis = std::get<TestSet::SubspaceBall>(t.shape()).basis;
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd residual = xv - basis * (basis.transpose() * xv);
    return xv.norm() <= 1.0 + tol && residual.norm() <= tol;
}

/// Finite sets as CSV: header "dim=<n>", then one vector per row.
inline std::string store_csv(const TestSet& t) {
    std::string out = "dim=" + std::to_string(t.dim()) + "\n";
    char buf[32];
    for (const auto& p : t.points()) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", p[i]);
            out += (i == 0 ? "" : ",");
            out += buf;
        }
        out += "\n";
    }
    return out;
}

inline TestSet load_csv(const std::string& text, std::string id = "csv") {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("dim=", 0) != 0) {
        throw ParameterError("test set CSV must start with 'dim=<n>'");
    }
    std::size_t n = 0;
    try {
        n = std::stoul(line.substr(4));
    } catch (const std::exception&) {
        throw ParameterError("malformed dimension header '" + line + "'");
    }
    std::vector<Vector> pts;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        Vector p;
        std::istringstream row(line);
        for (std::string cell; std::getline(row, cell, ',');) {
            try {
                std::size_t used = 0;
                p.push_back(std::stod(cell, &used));
                if (used != cell.size()) {
                    throw std::invalid_argument(cell);
                }
            } catch (const std::exception&) {
                throw ParameterError("malformed CSV value '" + cell + "'");
            }
        }
        pts.push_back(std::move(p));
    }
    return TestSet::finite(n, std::move(pts), std::move(id));
}

}  // namespace subemb
