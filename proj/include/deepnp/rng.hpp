#pragma once

#include <cstdint>
#include <random>

namespace deepnp {

// All randomness flows through mt19937_64: the standard pins its output
// sequence, so runs replay bit-for-bit across platforms and compilers.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one generator word.
// Avoids std::uniform_real_distribution, whose output is not portable.
inline double uniform01(Rng& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform_range(Rng& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

// splitmix64 finalizer; decorrelates nearby integer inputs.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Child seed for (base, a, b), e.g. per sweep point and repetition.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(base ^ mix64(a ^ mix64(b)));
}

}  // namespace deepnp
