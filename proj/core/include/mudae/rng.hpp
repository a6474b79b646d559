#pragma once

#include <cstdint>

namespace mudae {

// Counter-based generator: every draw is a pure function of (seed, index, dim),
// so sampling is reproducible regardless of worker count or evaluation order.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform double in [0, 1) keyed by (seed, index, dim).
inline double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t dim) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(index + 1));
    h = splitmix64(h + 0xD1B54A32D192ED03ULL * (dim + 1));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace mudae
