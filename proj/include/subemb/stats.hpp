#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "subemb/error.hpp"

namespace subemb::stats {

/// Pairwise (cascade) summation; the result depends only on the order of
/// the input, never on how it was produced.
inline double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double acc = 0.0;
        for (double v : values) {
            acc += v;
        }
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double mean(std::span<const double> values) {
    if (values.empty()) {
        throw ParameterError("mean of an empty sample");
    }
    return pairwise_sum(values) / static_cast<double>(values.size());
}

/// Standard error of the mean: sample standard deviation / sqrt(n). Zero for n < 2.
inline double standard_error(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) {
        return 0.0;
    }
    const double mu = mean(values);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = values[i] - mu;
        sq[i] = d * d;
    }
    const double variance = pairwise_sum(sq) / static_cast<double>(n - 1);
    return std::sqrt(variance / static_cast<double>(n));
}

/// Nearest-rank quantile: the ceil(q * n)-th smallest value (1-based), q in [0, 1].
inline double nearest_rank(std::span<const double> sorted, double q) {
    if (sorted.empty()) {
        throw ParameterError("quantile of an empty sample");
    }
    if (q <= 0.0) {
        return sorted.front();
    }
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

}  // namespace subemb::stats
