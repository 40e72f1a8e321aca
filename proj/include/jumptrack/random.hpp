#pragma once

#include <cstdint>
#include <random>

namespace jumptrack {

using RandomEngine = std::mt19937_64;

namespace detail {

/// splitmix64 finalizer; mixes a 64-bit word into a well-distributed one.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Derives an independent engine from a master seed and up to two stream
/// indices. Streams are a pure function of their arguments, so per-particle
/// randomness does not depend on thread scheduling.
inline RandomEngine make_stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = detail::mix64(seed);
    s = detail::mix64(s ^ detail::mix64(a + 0x517cc1b727220a95ULL));
    s = detail::mix64(s ^ detail::mix64(b + 0x2545f4914f6cdd1dULL));
    return RandomEngine(s);
}

}  // namespace jumptrack
