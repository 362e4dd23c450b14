#pragma once

/// @file rng.hpp
/// @brief Counter-based random streams.
///
/// Each draw is a SplitMix64 hash of (seed, stream, counter), so any sample
/// can be regenerated independently of how work is split across threads.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace beatnls {

/// Default seed used by every stochastic routine unless overridden.
inline constexpr std::uint64_t kDefaultSeed = 20240917ULL;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

    /// 64 random bits for the given counter value.
    [[nodiscard]] constexpr std::uint64_t bits(std::uint64_t counter) const {
        return splitmix64(key_ ^ splitmix64(counter));
    }

    /// Uniform in the open interval (0, 1).
    [[nodiscard]] double uniform(std::uint64_t counter) const {
        return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Modulus with density (2a/v) e^{-a²/v}, i.e. |α| for complex Gaussian α with E|α|² = v.
    [[nodiscard]] double rayleigh(std::uint64_t counter, double v) const {
        return std::sqrt(-v * std::log(uniform(counter)));
    }

    /// Complex Gaussian with E|z|² = v; consumes counters 2c and 2c+1.
    [[nodiscard]] std::complex<double> complex_gaussian(std::uint64_t counter, double v) const {
        const double r = rayleigh(2 * counter, v);
        const double th = 2.0 * std::numbers::pi * uniform(2 * counter + 1);
        return std::polar(r, th);
    }

private:
    std::uint64_t key_;
};

}  // namespace beatnls
