#pragma once

#include <cstdint>

#include "capflow/vec.hpp"

namespace capflow {

/// Counter-based sampling: every variate is a pure function of (seed, index,
/// dimension).  Samples can therefore be drawn in any order, from any thread,
/// with identical results -- the serial and OpenMP paths agree bit for bit.
namespace rng {

inline std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derive an independent stream seed (used to split seeds per call site).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t salt) {
    return mix(seed ^ mix(salt));
}

/// Uniform double in [0, 1) for sample `index`, coordinate `dim`.
inline double uniform(std::uint64_t seed, std::uint64_t index, std::uint64_t dim) {
    std::uint64_t z = mix(seed ^ mix(index * 0x9E3779B97F4A7C15ULL + dim + 1));
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

/// Uniform point in an axis-aligned box (dims 0..2 of the sample).
inline Vec3 in_box(std::uint64_t seed, std::uint64_t index, const Box3& box) {
    Vec3 e = box.extent();
    return {box.lo.x + e.x * uniform(seed, index, 0),
            box.lo.y + e.y * uniform(seed, index, 1),
            box.lo.z + e.z * uniform(seed, index, 2)};
}

/// Uniform point in the unit ball (dims 0..3): uniform direction from the
/// inverse-CDF of the polar angle, radius from the cube-root transform.
inline Vec3 in_unit_ball(std::uint64_t seed, std::uint64_t index, std::uint64_t dim0 = 0) {
    double ct = 2.0 * uniform(seed, index, dim0) - 1.0;           // cos(theta)
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double phi = 6.283185307179586476925286766559 * uniform(seed, index, dim0 + 1);
    double r = std::cbrt(uniform(seed, index, dim0 + 2));
    return {r * st * std::cos(phi), r * st * std::sin(phi), r * ct};
}

inline Vec3 in_ball(std::uint64_t seed, std::uint64_t index, const Vec3& center, double radius,
                    std::uint64_t dim0 = 0) {
    return center + radius * in_unit_ball(seed, index, dim0);
}

/// Uniform direction on the unit sphere (dims dim0, dim0+1).
inline Vec3 on_unit_sphere(std::uint64_t seed, std::uint64_t index, std::uint64_t dim0 = 0) {
    double ct = 2.0 * uniform(seed, index, dim0) - 1.0;
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double phi = 6.283185307179586476925286766559 * uniform(seed, index, dim0 + 1);
    return {st * std::cos(phi), st * std::sin(phi), ct};
}

}  // namespace rng
}  // namespace capflow
