#pragma once

#include <cmath>
#include <functional>

#include "capflow/vec.hpp"

namespace capflow {

using ScalarFn = std::function<double(const Vec3&)>;

/// Catalog scalar fields used by the maximal-function and covering checks.
namespace scalars {

inline ScalarFn constant(double c) {
    return [c](const Vec3&) { return c; };
}

inline ScalarFn gaussian_bump(const Vec3& center = {}, double width = 1.0, double amplitude = 1.0) {
    const double iw2 = 1.0 / (2.0 * width * width);
    return [=](const Vec3& x) { return amplitude * std::exp(-norm2(x - center) * iw2); };
}

/// C^1 radial ramp from 1 inside |x - c| < r0 - w/2 to 0 outside r0 + w/2.
inline ScalarFn smoothed_indicator(const Vec3& center = {}, double r0 = 1.0, double w = 0.02) {
    return [=](const Vec3& x) {
        const double t = (r0 + 0.5 * w - norm(x - center)) / w;
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        return t * t * (3.0 - 2.0 * t);
    };
}

/// |x|^(-3/p) inside the unit ball, zero outside; its weak-Lp quasi-norm is
/// |B_1|^(1/p) exactly.
inline ScalarFn power_law(double p) {
    const double expo = -3.0 / p;
    return [=](const Vec3& x) {
        const double r = norm(x);
        if (r >= 1.0 || r == 0.0) return 0.0;
        return std::pow(r, expo);
    };
}

}  // namespace scalars
}  // namespace capflow
