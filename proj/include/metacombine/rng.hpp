#pragma once

#include <cstdint>

#include "metacombine/special_functions.hpp"

namespace metacombine {

// Counter-based generator: every value is a pure function of
// (seed, draw, coord), so draws are order-independent and safe to
// evaluate from any thread in any order.
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t draw,
                                  std::uint64_t coord) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ draw);
    return splitmix64(h ^ coord);
}

// Uniform on the open interval (0,1); never returns an endpoint.
inline double uniform_open(std::uint64_t seed, std::uint64_t draw, std::uint64_t coord) {
    const std::uint64_t bits = counter_hash(seed, draw, coord);
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

inline double normal_draw(std::uint64_t seed, std::uint64_t draw, std::uint64_t coord) {
    return norm_quantile(uniform_open(seed, draw, coord));
}

}  // namespace metacombine
