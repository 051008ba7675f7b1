#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "subemb/error.hpp"
#include "subemb/parallel.hpp"
#include "subemb/random.hpp"
#include "subemb/stats.hpp"
#include "subemb/testsets.hpp"

namespace subemb {

enum class WidthKind { Width, Complexity };

inline std::string to_string(WidthKind k) { return k == WidthKind::Width ? "width" : "complexity"; }

/// Monte Carlo (or closed-form) value of w(T) or gamma(T).
struct WidthEstimate {
    double value = 0.0;
    double std_error = 0.0;  // sample standard deviation / sqrt(samples); 0 for closed forms
    std::size_t samples = 0;
    WidthKind kind = WidthKind::Width;
    bool closed_form = false;
};

/// g ~ N(0, I_n) for Monte Carlo sample `index`. Width and complexity of any
/// set share this stream for a given seed.
inline Vector gaussian_direction(std::size_t n, std::uint64_t seed, std::uint64_t index) {
    Stream stream({seed, index, 0}, StreamDomain::Gaussian);
    Vector g(n);
    for (double& v : g) {
        v = stream.normal();
    }
    return g;
}

namespace detail {

inline WidthEstimate estimate_sup_mean(const TestSet& t, std::size_t samples, std::uint64_t seed, WidthKind kind) {
    if (samples < 2) {
        throw ParameterError("width estimation needs at least 2 samples");
    }
    std::vector<double> values(samples);
    const bool signed_sup = kind == WidthKind::Complexity;
    parallel::for_each_index(samples, [&](std::size_t i) {
        const Vector g = gaussian_direction(t.dim(), seed, i);
        values[i] = sup_linear(t, g, signed_sup).value;
    });
    return {stats::mean(values), stats::standard_error(values), samples, kind, false};
}

}  // namespace detail

/// Mean over g ~ N(0, I_n) of sup_{x in T} <g, x>.
inline WidthEstimate estimate_width(const TestSet& t, std::size_t samples, std::uint64_t seed) {
    return detail::estimate_sup_mean(t, samples, seed, WidthKind::Width);
}

/// Mean over g ~ N(0, I_n) of sup_{x in T} |<g, x>|.
inline WidthEstimate estimate_complexity(const TestSet& t, std::size_t samples, std::uint64_t seed) {
    return detail::estimate_sup_mean(t, samples, seed, WidthKind::Complexity);
}

/// gamma of the difference set {e1 - ei : i = 2..n} without materializing it.
///
/// sup_i |g1 - gi| only depends on g1 and on the max and min of the other n - 1
/// coordinates, so each sample draws those two order statistics directly by
/// inversion. The cost per sample is O(1), which keeps n in the millions cheap.
inline WidthEstimate difference_set_complexity(std::uint64_t n, std::size_t samples, std::uint64_t seed) {
    if (n < 2) {
        throw ParameterError("the difference set needs n >= 2");
    }
    if (samples < 2) {
        throw ParameterError("width estimation needs at least 2 samples");
    }
    const auto others = static_cast<double>(n - 1);
    // Standard normal quantile written through erfc_inv, accurate deep in both tails.
    const auto quantile = [](double p) {
        p = std::clamp(p, 1e-300, 1.0 - 0x1.0p-53);
        return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    };
    std::vector<double> values(samples);
    parallel::for_each_index(samples, [&](std::size_t i) {
        Stream stream({seed, i, 0}, StreamDomain::Gaussian);
        const double g1 = stream.normal();
        // P(max > M) = 1 - U^(1/(n-1)).
        const double upper = -std::expm1(std::log(stream.uniform_positive()) / others);
        const double hi = -quantile(upper);
        double lo = hi;
        if (n > 2) {
            // Given the max, the remaining n - 2 values are iid below it.
            const double below = (1.0 - upper) * -std::expm1(std::log(stream.uniform_positive()) / (others - 1.0));
            lo = quantile(below);
        }
        values[i] = std::max(g1 - lo, hi - g1);
    });
    return {stats::mean(values), stats::standard_error(values), samples, WidthKind::Complexity, false};
}

/// Mean of the chi distribution with d degrees of freedom: sqrt2 * Gamma((d+1)/2) / Gamma(d/2).
inline double chi_mean(std::size_t d) {
    const double h = static_cast<double>(d) / 2.0;
    return std::numbers::sqrt2 * std::exp(std::lgamma(h + 0.5) - std::lgamma(h));
}

/// Exact values where a closed form is registered:
///   singleton {x}:  gamma = ||x|| sqrt(2/pi)
///   subspace ball:  w = gamma = E||P g|| = chi_mean(d)
inline std::optional<WidthEstimate> closed_form_complexity(const TestSet& t) {
    if (const auto* f = std::get_if<TestSet::Finite>(&t.shape()); f && f->points.size() == 1) {
        const double r = norm2(f->points.front());
        return WidthEstimate{r * std::sqrt(2.0 / std::numbers::pi), 0.0, 0, WidthKind::Complexity, true};
    }
    if (const auto* sb = std::get_if<TestSet::SubspaceBall>(&t.shape())) {
        return WidthEstimate{chi_mean(static_cast<std::size_t>(sb->basis.cols())), 0.0, 0, WidthKind::Complexity,
                             true};
    }
    return std::nullopt;
}

}  // namespace subemb
