#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace qsr {

// splitmix64; used to derive independent sub-stream seeds so that parallel
// work items get reproducible randomness regardless of thread count.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0x51ed2701ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t base, std::uint64_t stream = 0) {
    return std::mt19937_64(derive_seed(base, stream));
}

// Uniform double in [0,1) with 53 random bits; avoids distribution state.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n); n must be > 0. Rejection-free modulo bias is
// negligible for the small n used here, but do it properly anyway.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

// Marsaglia polar method; stateless across calls (discards the pair's twin).
inline double normal01(std::mt19937_64& rng) {
    for (;;) {
        const double u = 2.0 * uniform01(rng) - 1.0;
        const double v = 2.0 * uniform01(rng) - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

} // namespace qsr
