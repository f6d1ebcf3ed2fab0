#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hisd::detail {

/// Uniform double in [0, 1) built from the top 53 bits of the generator
/// output, so results are identical across standard libraries.
inline double rand_u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

/// Uniform integer in [lo, hi], inclusive.
inline int rand_int(std::mt19937_64& rng, int lo, int hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(rng() % span);
}

/// Standard normal via Box-Muller (cosine branch only, for a fixed
/// draws-per-sample count).
inline double rand_normal(std::mt19937_64& rng) {
    const double u1 = 1.0 - rand_u01(rng);   // (0, 1]
    const double u2 = rand_u01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace hisd::detail
