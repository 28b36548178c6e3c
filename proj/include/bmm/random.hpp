#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace bmm {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed for replication `index` of a run seeded with `seed`:
/// splitmix64(seed ^ splitmix64(index)).
constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return splitmix64(seed ^ splitmix64(index));
}

/// Portable seeded source. The engine is std::mt19937_64, whose output sequence
/// is fixed by the standard. Distributions are implemented here rather than via
/// <random> distribution classes, whose algorithms vary between libraries:
///
///  - uniform01: top 53 bits of one draw, scaled by 2^-53, in [0, 1).
///  - normal: basic Box-Muller, cosine branch only. Each variate consumes two
///    draws u1, u2 and returns sqrt(-2 ln(1 - u1)) * cos(2 pi u2).
///  - exponential: -ln(1 - u) / rate.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    double uniform01() { return double(engine_() >> 11) * 0x1.0p-53; }

    double normal(double mean, double stddev) {
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log1p(-u1));
        return mean + stddev * radius * std::cos(2.0 * std::numbers::pi * u2);
    }

    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    // Uniform integer in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace bmm
