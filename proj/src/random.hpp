// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "vf5/vec3.hpp"

namespace vf5::detail {

// Stream labels keep the generators of different kernels apart for one seed.
inline constexpr std::uint64_t kStreamScatter = 1;
inline constexpr std::uint64_t kStreamHotaru = 2;
inline constexpr std::uint64_t kStreamCone = 3;
inline constexpr std::uint64_t kStreamArrows = 4;
inline constexpr std::uint64_t kStreamNoise = 5;

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t generation) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(generation),
                      static_cast<std::uint32_t>(generation >> 32)};
    return std::mt19937_64(seq);
}

/// [0, 1) with 53 random bits; spelled out so results do not depend on the
/// standard library's distribution implementation.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Vec3 uniform_in_box(std::mt19937_64& rng, const Vec3& lo, const Vec3& hi) {
    const double x = lo.x + uniform01(rng) * (hi.x - lo.x);
    const double y = lo.y + uniform01(rng) * (hi.y - lo.y);
    const double z = lo.z + uniform01(rng) * (hi.z - lo.z);
    return {x, y, z};
}

}  // namespace vf5::detail
