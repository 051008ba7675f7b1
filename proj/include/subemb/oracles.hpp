#pragma once

// Exact ground truth for the probabilistic claims checked at desk scale:
// binomial pmf sums, exhaustive enumeration, closed forms, and quadrature.
// Nothing here samples; every value is a deterministic function of its inputs.

#include <cmath>
#include <cstddef>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "subemb/ensembles.hpp"
#include "subemb/error.hpp"

namespace subemb::oracles {

enum class Method { PmfSum, Enumeration, Quadrature, ClosedForm };

inline std::string to_string(Method m) {
    switch (m) {
        case Method::PmfSum: return "pmf_sum";
        case Method::Enumeration: return "enumeration";
        case Method::Quadrature: return "quadrature";
        case Method::ClosedForm: return "closed_form";
    }
    return "unknown";
}

struct ExactValue {
    double value = 0.0;
    Method method = Method::ClosedForm;
    std::uint64_t work = 0;  // atoms enumerated or integrand evaluations
};

namespace detail {

inline void check_ms(std::size_t m, std::size_t s) {
    if (s < 1 || s > m) {
        throw ParameterError("oracle requires 1 <= s <= m");
    }
}

/// Binomial(m, s/m) pmf. Built by the ratio recurrence outward from the mode in
/// extended precision, then normalized, so no factorials are ever formed.
inline std::vector<long double> binomial_pmf(std::size_t m, std::size_t s) {
    check_ms(m, s);
    std::vector<long double> w(m + 1, 0.0L);
    if (s == m) {
        w[m] = 1.0L;
        return w;
    }
    const long double p = static_cast<long double>(s) / static_cast<long double>(m);
    const long double odds = p / (1.0L - p);
    const auto mode = static_cast<std::size_t>(std::floor(static_cast<long double>(m + 1) * p));
    w[mode] = 1.0L;
    for (std::size_t k = mode; k < m; ++k) {
        w[k + 1] = w[k] * static_cast<long double>(m - k) / static_cast<long double>(k + 1) * odds;
    }
    for (std::size_t k = mode; k > 0; --k) {
        w[k - 1] = w[k] * static_cast<long double>(k) / static_cast<long double>(m - k + 1) / odds;
    }
    long double total = 0.0L;
    for (long double v : w) {
        total += v;
    }
    for (long double& v : w) {
        v /= total;
    }
    return w;
}

}  // namespace detail

/// E|sqrt(Z) - sqrt(s)| for Z ~ Binomial(m, s/m): the distortion of an
/// approximately s-sparse column on T = {e1}.
inline ExactValue binom_sqrt_deviation(std::size_t m, std::size_t s) {
    const auto w = detail::binomial_pmf(m, s);
    const long double root_s = std::sqrt(static_cast<long double>(s));
    long double acc = 0.0L;
    for (std::size_t k = 0; k <= m; ++k) {
        acc += w[k] * std::abs(std::sqrt(static_cast<long double>(k)) - root_s);
    }
    return {static_cast<double>(acc), Method::PmfSum, m + 1};
}

struct CentralMoments {
    double second = 0.0;
    double fourth = 0.0;
};

/// E(Z - s)^2 and E(Z - s)^4 for Z ~ Binomial(m, s/m).
inline CentralMoments binom_central_moments(std::size_t m, std::size_t s) {
    const auto w = detail::binomial_pmf(m, s);
    long double second = 0.0L;
    long double fourth = 0.0L;
    for (std::size_t k = 0; k <= m; ++k) {
        const long double d = static_cast<long double>(k) - static_cast<long double>(s);
        second += w[k] * d * d;
        fourth += w[k] * d * d * d * d;
    }
    return {static_cast<double>(second), static_cast<double>(fourth)};
}

/// 2^s * C(m, s): the number of distinct exactly s-sparse sign columns.
inline std::uint64_t exact_sparse_count(std::size_t m, std::size_t s) {
    detail::check_ms(m, s);
    if (s >= 64) {
        throw OverflowError("2^s * C(m, s) does not fit in 64 bits");
    }
    unsigned __int128 c = 1;
    for (std::size_t i = 0; i < s; ++i) {
        c = c * (m - i) / (i + 1);  // exact: c * (m - i) is divisible by (i + 1) at every step
        if (c > std::numeric_limits<std::uint64_t>::max()) {
            throw OverflowError("C(m, s) does not fit in 64 bits");
        }
    }
    const unsigned __int128 total = c << s;
    if (total > std::numeric_limits<std::uint64_t>::max()) {
        throw OverflowError("2^s * C(m, s) does not fit in 64 bits");
    }
    return static_cast<std::uint64_t>(total);
}

/// P{A_1 = A_2} = 1 / (2^s C(m, s)) for two independent exactly s-sparse columns.
inline ExactValue collision_probability(std::size_t m, std::size_t s) {
    const std::uint64_t count = exact_sparse_count(m, s);
    return {static_cast<double>(1.0L / static_cast<long double>(count)), Method::ClosedForm, count};
}

/// ceil((2 e m / s)^(3 s)): the column count at which the difference set
/// {e1 - ei} forces a collision with constant probability.
inline std::uint64_t choose_n_for_lower_bound(std::size_t m, std::size_t s) {
    detail::check_ms(m, s);
    const long double base = 2.0L * std::numbers::e_v<long double> * static_cast<long double>(m) /
                             static_cast<long double>(s);
    const long double value = std::pow(base, 3.0L * static_cast<long double>(s));
    if (!(value < 0x1.0p62L)) {
        throw OverflowError("(2em/s)^(3s) is too large for (m=" + std::to_string(m) + ", s=" + std::to_string(s) +
                            "); choose smaller m or s");
    }
    return static_cast<std::uint64_t>(std::ceil(value));
}

inline constexpr std::uint64_t kEnumerationBudget = 1'000'000;

/// Every exactly s-sparse sign column of length m: supports in lexicographic
/// order, and for each support the sign patterns in lexicographic order (-1 < +1).
inline std::vector<SparseColumn> enumerate_exact_sparse(std::size_t m, std::size_t s) {
    const std::uint64_t count = exact_sparse_count(m, s);
    if (count > kEnumerationBudget) {
        throw BudgetExceeded("enumerate_exact_sparse(" + std::to_string(m) + ", " + std::to_string(s) + ") has " +
                             std::to_string(count) + " columns, over the 1e6 budget");
    }
    std::vector<SparseColumn> out;
    out.reserve(count);
    std::vector<std::uint32_t> support(s);
    for (std::size_t i = 0; i < s; ++i) {
        support[i] = static_cast<std::uint32_t>(i);
    }
    for (;;) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s); ++mask) {
            SparseColumn col;
            for (std::size_t i = 0; i < s; ++i) {
                const bool plus = ((mask >> (s - 1 - i)) & 1u) != 0;
                col.entries.push_back({support[i], static_cast<std::int8_t>(plus ? 1 : -1)});
            }
            out.push_back(std::move(col));
        }
        std::size_t i = s;
        while (i > 0 && support[i - 1] == m - s + (i - 1)) {
            --i;
        }
        if (i == 0) {
            break;
        }
        ++support[i - 1];
        for (std::size_t j = i; j < s; ++j) {
            support[j] = support[j - 1] + 1;
        }
    }
    return out;
}

struct ChiSquare {
    double statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;
};

/// Pearson goodness-of-fit against the uniform law on counts.size() cells.
inline ChiSquare chi_square_uniform(std::span<const std::uint64_t> counts) {
    if (counts.size() < 2) {
        throw ParameterError("chi-square needs at least two cells");
    }
    long double total = 0.0L;
    for (auto c : counts) {
        total += static_cast<long double>(c);
    }
    if (total == 0.0L) {
        throw ParameterError("chi-square needs at least one observation");
    }
    const long double expected = total / static_cast<long double>(counts.size());
    long double stat = 0.0L;
    for (auto c : counts) {
        const long double d = static_cast<long double>(c) - expected;
        stat += d * d / expected;
    }
    ChiSquare out;
    out.statistic = static_cast<double>(stat);
    out.degrees_of_freedom = counts.size() - 1;
    out.p_value = boost::math::gamma_q(0.5 * static_cast<double>(out.degrees_of_freedom), 0.5 * out.statistic);
    return out;
}

inline constexpr std::uint64_t kEntryEnumerationBudget = 10'000'000;

/// E exp(mu * S), S = ||A x||^2 - 1, for each mu in the grid, by enumerating
/// every atom of the joint law of A. Supported ensembles: ExactSparse
/// ((2^s C(m,s))^n <= 1e6), ApproxSparse (3^(mn) <= 1e7), and
/// DenseRademacherScaled (2^(mn) <= 1e7).
inline std::vector<double> exact_mgf_small(const EnsembleSpec& spec, std::span<const double> x,
                                           std::span<const double> grid) {
    spec.validate();
    if (x.size() != spec.n) {
        throw DimensionMismatch("exact_mgf_small", spec.n, x.size());
    }
    double xn = 0.0;
    for (double v : x) {
        xn += v * v;
    }
    if (std::abs(std::sqrt(xn) - 1.0) > 1e-12) {
        throw ParameterError("exact_mgf_small requires a unit vector x");
    }
    const std::size_t m = spec.m;
    const std::size_t n = spec.n;
    std::vector<long double> acc(grid.size(), 0.0L);
    std::vector<double> y(m);

    auto accumulate = [&](long double weight) {
        long double sq = 0.0L;
        for (double v : y) {
            sq += static_cast<long double>(v) * v;
        }
        const long double s_value = sq - 1.0L;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            acc[g] += weight * std::exp(static_cast<long double>(grid[g]) * s_value);
        }
    };

    if (spec.variant == Variant::ExactSparse) {
        const auto atoms = enumerate_exact_sparse(m, spec.s);
        long double joint = 1.0L;
        for (std::size_t j = 0; j < n; ++j) {
            joint *= static_cast<long double>(atoms.size());
            if (joint > static_cast<long double>(kEnumerationBudget)) {
                throw BudgetExceeded("exact_mgf_small: (2^s C(m,s))^n exceeds the 1e6 budget");
            }
        }
        const long double weight = 1.0L / joint;
        std::vector<std::size_t> digit(n, 0);
        for (;;) {
            std::fill(y.begin(), y.end(), 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                axpy(atoms[digit[j]], x[j], y);
            }
            accumulate(weight);
            std::size_t j = 0;
            while (j < n && ++digit[j] == atoms.size()) {
                digit[j++] = 0;
            }
            if (j == n) {
                break;
            }
        }
    } else if (spec.variant == Variant::ApproxSparse || spec.variant == Variant::DenseRademacherScaled) {
        const bool sparse = spec.variant == Variant::ApproxSparse;
        const std::size_t radix = sparse ? 3 : 2;
        const std::size_t cells = m * n;
        long double joint = 1.0L;
        for (std::size_t c = 0; c < cells; ++c) {
            joint *= static_cast<long double>(radix);
            if (joint > static_cast<long double>(kEntryEnumerationBudget)) {
                throw BudgetExceeded("exact_mgf_small: entry enumeration exceeds the 1e7 budget");
            }
        }
        const long double p = static_cast<long double>(spec.s) / static_cast<long double>(m);
        const double unit = sparse ? 1.0 : 1.0 / std::sqrt(static_cast<double>(m));
        // digit 0: +unit, 1: -unit, 2: 0
        const std::array<long double, 3> prob = sparse ? std::array<long double, 3>{p / 2, p / 2, 1.0L - p}
                                                       : std::array<long double, 3>{0.5L, 0.5L, 0.0L};
        const std::array<double, 3> value{unit, -unit, 0.0};
        std::vector<std::size_t> digit(cells, 0);
        for (;;) {
            std::fill(y.begin(), y.end(), 0.0);
            long double weight = 1.0L;
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t i = 0; i < m; ++i) {
                    const std::size_t d = digit[j * m + i];
                    weight *= prob[d];
                    y[i] += value[d] * x[j];
                }
            }
            if (weight > 0.0L) {
                accumulate(weight);
            }
            std::size_t c = 0;
            while (c < cells && ++digit[c] == radix) {
                digit[c++] = 0;
            }
            if (c == cells) {
                break;
            }
        }
    } else {
        throw ParameterError("exact_mgf_small supports exact_sparse, approx_sparse and dense_rademacher only");
    }
    return {acc.begin(), acc.end()};
}

/// Smallest c with E exp(mu S) <= exp(c mu^2) on the grid (mu = 0 ignored).
inline double fit_mgf_constant(std::span<const double> grid, std::span<const double> mgf) {
    if (grid.size() != mgf.size()) {
        throw DimensionMismatch("fit_mgf_constant", grid.size(), mgf.size());
    }
    double c = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] != 0.0) {
            c = std::max(c, std::log(mgf[i]) / (grid[i] * grid[i]));
        }
    }
    return c;
}

/// A scalar law with a known subgaussian norm.
struct ScalarLaw {
    enum class Kind { Rademacher, SparseSign, Constant } kind = Kind::Rademacher;
    std::size_t m = 1;   // SparseSign: nonzero with probability s/m
    std::size_t s = 1;
    double constant = 0.0;

    /// "rademacher", "sparse_sign(m,s)", or "constant(c)".
    static ScalarLaw parse(const std::string& text) {
        ScalarLaw law;
        if (text == "rademacher") {
            return law;
        }
        const auto open = text.find('(');
        if (open == std::string::npos || text.back() != ')') {
            throw ParameterError("unknown scalar law '" + text + "'");
        }
        const std::string name = text.substr(0, open);
        const std::string args = text.substr(open + 1, text.size() - open - 2);
        try {
            if (name == "sparse_sign") {
                const auto comma = args.find(',');
                if (comma == std::string::npos) {
                    throw ParameterError("sparse_sign needs (m,s)");
                }
                law.kind = Kind::SparseSign;
                law.m = std::stoul(args.substr(0, comma));
                law.s = std::stoul(args.substr(comma + 1));
                detail::check_ms(law.m, law.s);
                return law;
            }
            if (name == "constant") {
                law.kind = Kind::Constant;
                law.constant = std::stod(args);
                return law;
            }
        } catch (const std::logic_error&) {
            throw ParameterError("malformed scalar law '" + text + "'");
        }
        throw ParameterError("unknown scalar law '" + text + "'");
    }
};

/// Exact psi_2 norm: Rademacher 1/sqrt(ln 2); sparse sign 1/sqrt(ln(1 + m/s));
/// constant c: |c|/sqrt(ln 2).
inline ExactValue scalar_psi2_closed_form(const ScalarLaw& law) {
    switch (law.kind) {
        case ScalarLaw::Kind::Rademacher: return {1.0 / std::sqrt(std::numbers::ln2), Method::ClosedForm, 0};
        case ScalarLaw::Kind::SparseSign: {
            detail::check_ms(law.m, law.s);
            const double ratio = static_cast<double>(law.m) / static_cast<double>(law.s);
            return {1.0 / std::sqrt(std::log1p(ratio)), Method::ClosedForm, 0};
        }
        case ScalarLaw::Kind::Constant:
            return {std::abs(law.constant) / std::sqrt(std::numbers::ln2), Method::ClosedForm, 0};
    }
    throw ParameterError("unknown scalar law");
}

enum class Integral {
    AbsGaussianMean,  // E|g|
    MaxAbsPairMean,   // E max(|g1|, |g2|)
    ChiMean,          // mean of chi with d degrees of freedom
};

inline Integral integral_from_string(const std::string& name) {
    if (name == "abs_gaussian_mean") return Integral::AbsGaussianMean;
    if (name == "max_abs_pair_mean") return Integral::MaxAbsPairMean;
    if (name == "chi_mean") return Integral::ChiMean;
    throw ParameterError("unregistered integral '" + name + "'");
}

/// Adaptive Gauss-Kronrod on a truncated half line; truncation error is far
/// below 1e-8 (Gaussian tails past 40 standard deviations).
inline ExactValue quadrature(Integral which, std::size_t degrees_of_freedom = 1) {
    std::uint64_t evaluations = 0;
    auto phi = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
    double upper = 40.0;
    std::function<double(double)> integrand;
    switch (which) {
        case Integral::AbsGaussianMean:
            integrand = [&](double t) { return 2.0 * t * phi(t); };
            break;
        case Integral::MaxAbsPairMean:
            // E max(|g1|,|g2|) = int_0^inf P(max > t) dt = int_0^inf 1 - (2 Phi(t) - 1)^2 dt
            integrand = [](double t) {
                const double inside = std::erf(t / std::numbers::sqrt2);
                return 1.0 - inside * inside;
            };
            break;
        case Integral::ChiMean: {
            if (degrees_of_freedom < 1) {
                throw ParameterError("chi_mean requires at least one degree of freedom");
            }
            const double d = static_cast<double>(degrees_of_freedom);
            const double log_norm = (d / 2.0 - 1.0) * std::numbers::ln2 + std::lgamma(d / 2.0);
            upper = std::sqrt(d) + 40.0;
            integrand = [d, log_norm](double r) {
                if (r <= 0.0) {
                    return 0.0;
                }
                return r * std::exp((d - 1.0) * std::log(r) - 0.5 * r * r - log_norm);
            };
            break;
        }
    }
    auto counted = [&](double t) {
        ++evaluations;
        return integrand(t);
    };
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(counted, 0.0, upper, 20, 1e-13, &error);
    if (!(error <= 1e-8)) {
        throw OverflowError("quadrature did not reach 1e-8 absolute accuracy");
    }
    return {value, Method::Quadrature, evaluations};
}

}  // namespace subemb::oracles
