#pragma once

#include <cmath>
#include <cstdint>

// Counter-based randomness: every draw is a pure function of (seed, counters),
// so matrices and campaigns are reproducible independent of traversal order,
// chunking, or worker count. The mixer is the SplitMix64 finalizer chained over
// the counters; each logical draw gets its own stream index.

namespace speclab::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                   std::uint64_t c) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    return h;
}

// uniform in [0, 1)
inline double u01(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

// uniform in (0, 1); safe as a log argument
inline double u01_open(std::uint64_t bits) {
    return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

// standard normal via Box-Muller on streams (c, c+1)
inline double gaussian(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    const double u1 = u01_open(mix(seed, a, b, c));
    const double u2 = u01(mix(seed, a, b, c + 1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

// stable sub-seed derivation for nested deterministic contexts
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                           std::uint64_t b = 0, std::uint64_t c = 0) {
    return mix(master, a, b, c);
}

}  // namespace speclab::rng
