#include "capflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace capflow {

Capsule::Capsule(const Vec3& c, double R, double L, const Vec3& e)
    : center(c), radius(R), half_length(L), axis(e) {
    if (!(R > 0.0)) throw std::invalid_argument("Capsule: radius must be positive");
    if (!(L >= R)) throw std::invalid_argument("Capsule: half-length must satisfy L >= R");
    const double n = norm(e);
    if (std::abs(n - 1.0) > 1e-12) {
        if (n == 0.0) throw std::invalid_argument("Capsule: axis must be a unit vector");
        axis = e / n;
    }
}

double Capsule::segment_distance(const Vec3& y) const {
    const double h = core_half();
    const Vec3 d = y - center;
    const double t = std::clamp(dot(d, axis), -h, h);
    return norm(d - t * axis);
}

Box3 Capsule::bounding_box() const {
    const double h = core_half();
    const Vec3 ext{h * std::abs(axis.x) + radius, h * std::abs(axis.y) + radius,
                   h * std::abs(axis.z) + radius};
    return {center - ext, center + ext};
}

bool contains(const Capsule& c, const Vec3& y) { return c.segment_distance(y) < c.radius; }

Capsule dilate(const Capsule& c, double lambda) {
    if (!(lambda >= 1.0)) throw std::invalid_argument("dilate: lambda must be >= 1");
    return Capsule(c.center, lambda * c.radius, lambda * c.half_length, c.axis);
}

double volume(const Capsule& c) {
    const double R = c.radius;
    return 4.18879020478639098462 * R * R * R + 6.28318530717958647692 * R * R * c.core_half();
}

double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
    // Clamped minimization of |p(s) - q(t)|^2 over the unit square.
    const Vec3 d1 = p1 - p0;
    const Vec3 d2 = q1 - q0;
    const Vec3 r = p0 - q0;
    const double a = dot(d1, d1);
    const double e = dot(d2, d2);
    const double f = dot(d2, r);
    double s = 0.0, t = 0.0;
    constexpr double kEps = 1e-30;
    if (a <= kEps && e <= kEps) {
        return norm(r);
    }
    if (a <= kEps) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = dot(d1, r);
        if (e <= kEps) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = dot(d1, d2);
            const double denom = a * e - b * b;
            if (denom > kEps) {
                s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
            }
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    const Vec3 cp = p0 + s * d1;
    const Vec3 cq = q0 + t * d2;
    return norm(cp - cq);
}

bool intersects(const Capsule& a, const Capsule& b) {
    const double d = segment_segment_distance(a.segment_a(), a.segment_b(), b.segment_a(), b.segment_b());
    return d < a.radius + b.radius;
}

double chord_length(double R, double l, const Vec3& x) {
    if (!(l > R) || !(R > 0.0)) throw std::invalid_argument("chord_length: requires l > R > 0");
    const double rho2 = x.y * x.y + x.z * x.z;
    if (rho2 >= R * R) return 0.0;
    const double s = std::sqrt(R * R - rho2);
    const double full = 2.0 * s;
    const double clipped = std::max(0.0, s + l - std::abs(x.x));
    return std::min(full, clipped);
}

std::string capsule_to_json(const Capsule& c) {
    nlohmann::ordered_json j;
    j["center"] = {c.center.x, c.center.y, c.center.z};
    j["R"] = c.radius;
    j["L"] = c.half_length;
    j["e"] = {c.axis.x, c.axis.y, c.axis.z};
    return j.dump();
}

Capsule capsule_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const auto& ctr = j.at("center");
    const auto& e = j.at("e");
    return Capsule({ctr.at(0), ctr.at(1), ctr.at(2)}, j.at("R"), j.at("L"),
                   {e.at(0), e.at(1), e.at(2)});
}

}  // namespace capflow
