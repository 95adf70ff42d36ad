#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qrobust {

/// splitmix64 step: advances `state` and returns the next 64-bit value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// One-shot mix of a 64-bit value.
inline std::uint64_t mix64(std::uint64_t x) {
    return splitmix64(x);
}

/// Counter-based sub-seed derivation: stream `index` of master seed `seed`.
/// Re-deriving the same (seed, index) always yields the same stream, no matter
/// how many other streams were derived in between or on which thread. This is
/// the rule every shot-parallel sampler in this library uses.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(mix64(seed ^ 0xda3e39cb94b95bdbULL));
}

/// Uniform double in [0, 1) with 53 random bits. Implemented by hand so the
/// stream is identical across standard libraries (std distributions are not
/// pinned by the standard).
inline double uniform_double(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Standard normal draw via Box-Muller (two uniforms per draw, no cached
/// second value, so the stream position is predictable).
inline double normal_double(std::mt19937_64& eng) {
    const double u1 = uniform_double(eng);
    const double u2 = uniform_double(eng);
    const double r = std::sqrt(-2.0 * std::log1p(-u1)); // 1-u1 in (0,1], log finite
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace qrobust
