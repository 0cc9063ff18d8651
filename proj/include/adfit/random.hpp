#pragma once

#include <cstdint>
#include <random>

namespace adfit {

// Uniform double in [0, 1) from the top 53 bits of the engine output.
// Unlike std::generate_canonical, this is bit-reproducible across
// standard library implementations.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

} // namespace adfit
