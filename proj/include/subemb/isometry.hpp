#pragma once

// Monte Carlo measurement of distortion, process increments, and empirical
// subgaussian norms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "subemb/ensembles.hpp"
#include "subemb/error.hpp"
#include "subemb/parallel.hpp"
#include "subemb/random.hpp"
#include "subemb/stats.hpp"
#include "subemb/testsets.hpp"

namespace subemb {

struct DistortionReport {
    EnsembleSpec spec;
    std::string set_id;
    double lambda = 1.0;
    std::size_t trials = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double min = 0.0;
    double max = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
    double q99 = 0.0;
    bool lower_bound = false;
    std::vector<double> per_trial;  // empty unless retained
};

/// Summary statistics of a list of per-trial distortions.
inline DistortionReport summarize(std::span<const double> deltas) {
    if (deltas.empty()) {
        throw ParameterError("cannot summarize zero trials");
    }
    std::vector<double> sorted(deltas.begin(), deltas.end());
    std::sort(sorted.begin(), sorted.end());
    DistortionReport r;
    r.trials = deltas.size();
    r.mean = stats::mean(deltas);
    r.std_error = stats::standard_error(deltas);
    r.min = sorted.front();
    r.max = sorted.back();
    r.q50 = stats::nearest_rank(sorted, 0.5);
    r.q90 = stats::nearest_rank(sorted, 0.9);
    r.q99 = stats::nearest_rank(sorted, 0.99);
    return r;
}

/// Draws `trials` independent matrices (trial t uses SeedPath{seed, t, 0}),
/// computes the distortion of each on T, and aggregates.
inline DistortionReport isometry_trials(const EnsembleSpec& spec, const TestSet& t, double lambda,
                                        std::size_t trials, std::uint64_t seed, bool retain = false) {
    if (trials < 1) {
        throw ParameterError("isometry_trials needs at least one trial");
    }
    spec.validate();
    if (spec.n != t.dim()) {
        throw DimensionMismatch("isometry_trials: ensemble columns vs test set dimension", t.dim(), spec.n);
    }
    std::vector<double> deltas(trials);
    std::vector<char> lower(trials, 0);
    parallel::for_each_index(trials, [&](std::size_t i) {
        const ColumnMatrix a = sample_matrix(spec, {seed, i, 0});
        const Distortion d = distortion_sup(t, a, lambda);
        deltas[i] = d.delta;
        lower[i] = d.lower_bound ? 1 : 0;
    });
    DistortionReport r = summarize(deltas);
    r.spec = spec;
    r.set_id = t.id();
    r.lambda = lambda;
    r.lower_bound = std::any_of(lower.begin(), lower.end(), [](char c) { return c != 0; });
    if (retain) {
        r.per_trial = std::move(deltas);
    }
    return r;
}

struct Increment {
    double ratio = 0.0;          // (Z_x - Z_y) / ||x - y||, Z_x = ||Ax|| - lambda ||x||
    double squared_ratio = 0.0;  // (||Ax||^2 - ||Ay||^2) / ||x - y||
};

inline Increment increment_sample(const ColumnMatrix& a, std::span<const double> x, std::span<const double> y,
                                  double lambda) {
    if (x.size() != a.cols() || y.size() != a.cols()) {
        throw DimensionMismatch("increment_sample", a.cols(), x.size() != a.cols() ? x.size() : y.size());
    }
    Vector diff(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        diff[i] = x[i] - y[i];
    }
    const double dist = norm2(diff);
    if (dist == 0.0) {
        throw DegenerateInput("increment_sample requires x != y");
    }
    const double ax = norm2(matvec(a, x));
    const double ay = norm2(matvec(a, y));
    const double zx = ax - lambda * norm2(x);
    const double zy = ay - lambda * norm2(y);
    return {(zx - zy) / dist, (ax * ax - ay * ay) / dist};
}

/// Off-diagonal expansion of the squared increment:
///   sum_{i != j} <A_i, A_j> u_i vhat_j,  u = x + y, vhat = (x - y)/||x - y||.
/// Equals increment_sample(...).squared_ratio when all columns share one norm
/// and ||x|| = ||y||, since the diagonal term then cancels.
inline double squared_ratio_off_diagonal(const ColumnMatrix& a, std::span<const double> x,
                                         std::span<const double> y) {
    if (x.size() != a.cols() || y.size() != a.cols()) {
        throw DimensionMismatch("squared_ratio_off_diagonal", a.cols(), x.size());
    }
    const std::size_t n = x.size();
    Vector u(n);
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = x[i] + y[i];
        v[i] = x[i] - y[i];
    }
    const double vn = norm2(v);
    if (vn == 0.0) {
        throw DegenerateInput("squared_ratio_off_diagonal requires x != y");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (u[i] == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && v[j] != 0.0) {
                acc += dot(a.column(i), a.column(j)) * u[i] * (v[j] / vn);
            }
        }
    }
    return acc;
}

enum class Psi2Method { MgfRoot, MomentSup };

inline std::string to_string(Psi2Method m) { return m == Psi2Method::MgfRoot ? "mgf_root" : "moment_sup"; }

struct Psi2Fit {
    double value = 0.0;
    Psi2Method method = Psi2Method::MgfRoot;
    std::size_t samples = 0;
};

namespace detail {

/// log( mean_i exp(z_i^2 / t^2) ), computed stably.
inline double log_mean_exp_sq(std::span<const double> z, double t) {
    double peak = -std::numeric_limits<double>::infinity();
    for (double v : z) {
        peak = std::max(peak, v * v / (t * t));
    }
    double acc = 0.0;
    for (double v : z) {
        acc += std::exp(v * v / (t * t) - peak);
    }
    return peak + std::log(acc / static_cast<double>(z.size()));
}

}  // namespace detail

/// Empirical subgaussian norm.
///  - MgfRoot: the t solving mean exp(Z^2/t^2) = 2 on the sample (bisection, 1e-9 relative);
///  - MomentSup: max over p in {2, 4, ..., 16} of p^{-1/2} (mean |Z|^p)^{1/p}.
inline Psi2Fit empirical_psi2(std::span<const double> samples, Psi2Method method) {
    for (double v : samples) {
        if (!std::isfinite(v)) {
            throw ParameterError("empirical_psi2 samples must be finite");
        }
    }
    Psi2Fit fit{0.0, method, samples.size()};
    double peak = 0.0;
    for (double v : samples) {
        peak = std::max(peak, std::abs(v));
    }
    if (method == Psi2Method::MomentSup) {
        if (samples.empty()) {
            throw ParameterError("empirical_psi2 needs samples");
        }
        if (peak == 0.0) {
            return fit;
        }
        double best = 0.0;
        for (int p = 2; p <= 16; p += 2) {
            // Normalize by the peak to keep |z|^16 in range.
            double acc = 0.0;
            for (double v : samples) {
                acc += std::pow(std::abs(v) / peak, p);
            }
            const double moment = peak * std::pow(acc / static_cast<double>(samples.size()), 1.0 / p);
            best = std::max(best, moment / std::sqrt(static_cast<double>(p)));
        }
        fit.value = best;
        return fit;
    }
    if (samples.size() < 100) {
        throw ParameterError("mgf_root needs at least 100 samples");
    }
    if (peak == 0.0) {
        return fit;
    }
    constexpr double kCeiling = 1e6;
    const double log2 = std::log(2.0);
    if (detail::log_mean_exp_sq(samples, kCeiling) > log2) {
        throw OverflowError("empirical mgf exceeds 2 at t = 1e6; no root below the ceiling");
    }
    // At t = peak/sqrt(ln 2) every term is <= 2; at t = peak/sqrt(ln 2N) the largest alone gives >= 2.
    double hi = std::min(kCeiling, peak / std::sqrt(log2));
    double lo = peak / std::sqrt(std::log(2.0 * static_cast<double>(samples.size())));
    while ((hi - lo) > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (detail::log_mean_exp_sq(samples, mid) > log2) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    fit.value = 0.5 * (lo + hi);
    return fit;
}

}  // namespace subemb
