#pragma once

// Counter-based random streams.
//
// Every random quantity in the library is a pure function of a SeedPath
// (master seed, trial index, column index) and a domain tag, so results do
// not depend on thread scheduling or on the order in which streams are
// consumed. The block cipher is Philox4x32-10.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include "subemb/error.hpp"

namespace subemb {

/// One Philox4x32-10 evaluation: 4 x 32-bit counter, 2 x 32-bit key.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    [[nodiscard]] static constexpr Counter apply(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Child seed for a labelled sub-experiment (cell, arm, ...).
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) noexcept {
    return splitmix64(seed ^ splitmix64(label + 0x5851F42D4C957F2Dull));
}

/// Address of one independent stream.
struct SeedPath {
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;
    std::uint64_t column_index = 0;

    friend bool operator==(const SeedPath&, const SeedPath&) = default;
};

/// Separates streams that share a SeedPath but feed different consumers.
enum class StreamDomain : std::uint32_t {
    Matrix = 0,
    Gaussian = 1,
    TestSet = 2,
};

class Stream {
public:
    explicit Stream(const SeedPath& path, StreamDomain domain = StreamDomain::Matrix) {
        if (path.column_index > std::numeric_limits<std::uint32_t>::max()) {
            throw ParameterError("column index exceeds the 32-bit stream address space");
        }
        const std::uint64_t k =
            domain == StreamDomain::Matrix
                ? path.master_seed
                : derive_seed(path.master_seed, 0xD0000000ull + static_cast<std::uint64_t>(domain));
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
        counter_ = {0u, static_cast<std::uint32_t>(path.column_index),
                    static_cast<std::uint32_t>(path.trial_index),
                    static_cast<std::uint32_t>(path.trial_index >> 32)};
    }

    std::uint32_t next_u32() {
        if (lane_ == 4) {
            refill();
        }
        return block_[lane_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_positive() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Exactly uniform integer in [0, bound) (Lemire's multiply-and-reject).
    std::uint64_t bounded(std::uint64_t bound) {
        if (bound == 0) {
            throw ParameterError("bounded() requires a positive bound");
        }
        unsigned __int128 product = static_cast<unsigned __int128>(next_u64()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<unsigned __int128>(next_u64()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    /// Uniform sign in {-1, +1}.
    int sign() { return (next_u32() & 1u) != 0 ? -1 : 1; }

    /// Standard normal via the Marsaglia polar transform.
    double normal() {
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        double u = 0.0;
        double v = 0.0;
        double r2 = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            r2 = u * u + v * v;
        } while (r2 >= 1.0 || r2 == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = v * scale;
        return u * scale;
    }

    /// Number of failures before the first success of a Bernoulli(p) sequence.
    std::uint64_t geometric_gap(double p) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw ParameterError("geometric_gap requires p in (0, 1]");
        }
        if (p == 1.0) {
            return 0;
        }
        const double gap = std::floor(std::log(uniform_positive()) / std::log1p(-p));
        if (gap >= 1.8e19) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        return static_cast<std::uint64_t>(gap);
    }

private:
    void refill() {
        block_ = Philox4x32::apply(counter_, key_);
        ++counter_[0];
        lane_ = 0;
    }

    Philox4x32::Key key_{};
    Philox4x32::Counter counter_{};
    Philox4x32::Counter block_{};
    int lane_ = 4;
    std::optional<double> spare_;
};

}  // namespace subemb
