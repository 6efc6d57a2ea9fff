// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Randomness helpers. std::mt19937_64 is bit-exact across platforms, but the
// standard distributions are not, so the draws used in optimizer updates and
// map generation are implemented here from raw engine output.

namespace wspso {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-independent hash of a key tuple, for per-voxel noise fields.
inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t k) {
    return splitmix64(seed ^ splitmix64(k));
}

/// Uniform double in [0, 1).
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1]; safe for log().
inline double uniform01_open(std::mt19937_64& rng) {
    return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [lo, hi], inclusive.
inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(rng() % span);
}

/// Standard normal via Box-Muller; consumes exactly two engine draws.
inline double gaussian(std::mt19937_64& rng) {
    const double u1 = uniform01_open(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

/// Unit-interval value derived from a hash, in (0, 1].
inline double hash_to_unit(std::uint64_t h) {
    return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

/// Standard normal derived from two hashed keys (order-independent).
inline double hash_to_gaussian(std::uint64_t seed, std::uint64_t key) {
    const double u1 = hash_to_unit(hash_combine(seed, key * 2 + 0));
    const double u2 = hash_to_unit(hash_combine(seed, key * 2 + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

} // namespace wspso
