#pragma once

#include <cstdint>

namespace ebl {

/// SplitMix64 generator. The algorithm is fixed so that seeded outputs can be
/// reproduced bit-for-bit by other implementations:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// uniform() uses the top 53 bits; normal() is Box-Muller without caching.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);
    double normal();

private:
    std::uint64_t state_;
};

}  // namespace ebl
