#pragma once

#include <string>

#include "capflow/quadrature.hpp"
#include "capflow/vec.hpp"

namespace capflow {

/// Spherocylinder: the open set of points at distance < radius from the core
/// segment center +- (half_length - radius) * axis.  When half_length ==
/// radius the core segment degenerates and the shape is the open ball.
struct Capsule {
    Vec3 center{};
    double radius = 1.0;       // R > 0
    double half_length = 1.0;  // L >= R
    Vec3 axis = kE1;           // unit vector

    Capsule() = default;
    Capsule(const Vec3& c, double R, double L, const Vec3& e);

    static Capsule ball(const Vec3& c, double R) { return Capsule(c, R, R, kE1); }

    double core_half() const { return half_length - radius; }
    Vec3 segment_a() const { return center - core_half() * axis; }
    Vec3 segment_b() const { return center + core_half() * axis; }

    /// Distance from y to the core segment (exact clamped projection).
    double segment_distance(const Vec3& y) const;

    /// Tight axis-aligned bounding box.
    Box3 bounding_box() const;
};

/// Strict membership: dist(y, core segment) < R.
bool contains(const Capsule& c, const Vec3& y);

/// Scale radius and half-length about the same center/axis; lambda >= 1.
Capsule dilate(const Capsule& c, double lambda);

/// Exact volume (4/3) pi R^3 + 2 pi R^2 (L - R).
double volume(const Capsule& c);

/// Exact minimum distance between two segments (clamped quadratic
/// minimization over the two segment parameters).
double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);

/// Open-set overlap test: dist(segment_a, segment_b) < R_a + R_b.
bool intersects(const Capsule& a, const Capsule& b);

/// Length of { t in (-l, l) : |x - t e_1| < R } from the closed form
///   min{ 2 sqrt(R^2 - rho^2), (sqrt(R^2 - rho^2) + l - |x_1|)_+ },
/// rho^2 = x_2^2 + x_3^2; zero when rho >= R.  Requires l > R > 0.
double chord_length(double R, double l, const Vec3& x);

/// integral of f over the capsule.  Monte Carlo draws q.samples points in the
/// bounding box and weights members by the box volume; tensor mode sums f at
/// member cell midpoints of a resolution^3 grid over the bounding box.
template <class F>
double capsule_integral(const Capsule& c, F&& f, const QuadratureSpec& q) {
    q.validate();
    const Box3 box = c.bounding_box();
    if (q.mode == QuadratureSpec::Mode::Tensor) {
        const int n = q.resolution;
        const Vec3 e = box.extent();
        const Vec3 h{e.x / n, e.y / n, e.z / n};
        const double cell = h.x * h.y * h.z;
        const std::int64_t total = static_cast<std::int64_t>(n) * n * n;
        return cell * par::sum_index(total, [&](std::int64_t idx) {
            const int iz = static_cast<int>(idx / (n * n));
            const int iy = static_cast<int>((idx / n) % n);
            const int ix = static_cast<int>(idx % n);
            const Vec3 y{box.lo.x + (ix + 0.5) * h.x, box.lo.y + (iy + 0.5) * h.y,
                         box.lo.z + (iz + 0.5) * h.z};
            return contains(c, y) ? f(y) : 0.0;
        });
    }
    const double vbox = box.volume();
    double mean = par::sum_index(q.samples, [&](std::int64_t i) {
        const Vec3 y = rng::in_box(q.seed, static_cast<std::uint64_t>(i), box);
        return contains(c, y) ? f(y) : 0.0;
    }) / static_cast<double>(q.samples);
    return vbox * mean;
}

/// average of f over the capsule.  Monte Carlo uses the hit-mean ratio
/// estimator (mean of f over accepted samples), which is exact for constant
/// f; tensor mode averages over member cells.
template <class F>
double capsule_average(const Capsule& c, F&& f, const QuadratureSpec& q) {
    q.validate();
    const Box3 box = c.bounding_box();
    if (q.mode == QuadratureSpec::Mode::Tensor) {
        const int n = q.resolution;
        const Vec3 e = box.extent();
        const Vec3 h{e.x / n, e.y / n, e.z / n};
        const std::int64_t total = static_cast<std::int64_t>(n) * n * n;
        auto point = [&](std::int64_t idx) {
            const int iz = static_cast<int>(idx / (n * n));
            const int iy = static_cast<int>((idx / n) % n);
            const int ix = static_cast<int>(idx % n);
            return Vec3{box.lo.x + (ix + 0.5) * h.x, box.lo.y + (iy + 0.5) * h.y,
                        box.lo.z + (iz + 0.5) * h.z};
        };
        const double hits = par::sum_index(total, [&](std::int64_t i) {
            return contains(c, point(i)) ? 1.0 : 0.0;
        });
        if (hits == 0.0) return 0.0;
        const double sum = par::sum_index(total, [&](std::int64_t i) {
            const Vec3 y = point(i);
            return contains(c, y) ? f(y) : 0.0;
        });
        return sum / hits;
    }
    const double hits = par::sum_index(q.samples, [&](std::int64_t i) {
        return contains(c, rng::in_box(q.seed, static_cast<std::uint64_t>(i), box)) ? 1.0 : 0.0;
    });
    if (hits == 0.0) return 0.0;
    const double sum = par::sum_index(q.samples, [&](std::int64_t i) {
        const Vec3 y = rng::in_box(q.seed, static_cast<std::uint64_t>(i), box);
        return contains(c, y) ? f(y) : 0.0;
    });
    return sum / hits;
}

/// JSON round trip: {"center":[x,y,z],"R":..,"L":..,"e":[e1,e2,e3]}.
std::string capsule_to_json(const Capsule& c);
Capsule capsule_from_json(const std::string& text);

}  // namespace capflow
