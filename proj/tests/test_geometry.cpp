#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capflow/geometry.hpp"
#include "capflow/pipeline.hpp"
#include "capflow/rng.hpp"

using namespace capflow;

namespace {

// Membership oracle independent of the clamped-projection formula: distance
// to the core segment by coarse scan plus golden-section refinement of the
// smooth quadratic |y - c(t)|^2.
double oracle_segment_distance(const Capsule& c, const Vec3& y) {
    const double h = c.core_half();
    auto d2 = [&](double t) { return norm2(y - (c.center + t * c.axis)); };
    const int coarse = 512;
    double best_t = -h, best = d2(-h);
    for (int i = 1; i <= coarse; ++i) {
        const double t = -h + 2.0 * h * i / coarse;
        const double v = d2(t);
        if (v < best) {
            best = v;
            best_t = t;
        }
    }
    double lo = std::max(-h, best_t - 2.0 * h / coarse);
    double hi = std::min(h, best_t + 2.0 * h / coarse);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = d2(x1), f2 = d2(x2);
    for (int it = 0; it < 90; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = d2(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = d2(x2);
        }
    }
    return std::sqrt(std::min(f1, f2));
}

Capsule random_capsule(std::uint64_t seed, std::uint64_t i, double box = 10.0, double rmin = 0.5,
                       double rmax = 2.0) {
    const Vec3 center{box * (2.0 * rng::uniform(seed, i, 0) - 1.0),
                      box * (2.0 * rng::uniform(seed, i, 1) - 1.0),
                      box * (2.0 * rng::uniform(seed, i, 2) - 1.0)};
    const double R = rmin + (rmax - rmin) * rng::uniform(seed, i, 3);
    const double L = R * (1.0 + 3.0 * rng::uniform(seed, i, 4));
    const Vec3 e = rng::on_unit_sphere(seed, i, 5);
    return Capsule(center, R, L, e);
}

}  // namespace

TEST_CASE("membership basics") {
    const Capsule ball = Capsule::ball({0, 0, 0}, 1.0);
    CHECK(contains(ball, {0, 0, 0}));
    CHECK_FALSE(contains(ball, {1.0, 0, 0}));  // boundary is open

    const Capsule c({0, 0, 0}, 1.0, 3.0, kE1);
    CHECK(contains(c, {2.0, 0.999, 0.0}));
    CHECK_FALSE(contains(c, {2.0, 1.001, 0.0}));
}

TEST_CASE("membership against the scanned-segment oracle") {
    const Capsule c({0.5, -0.2, 0.3}, 1.0, 3.0, normalized(Vec3{1, 2, -0.5}));
    const Box3 box = dilate(c, 1.5).bounding_box();
    int disagreements = 0;
    for (int i = 0; i < 100000; ++i) {
        const Vec3 y = rng::in_box(101, static_cast<std::uint64_t>(i), box);
        const double d = oracle_segment_distance(c, y);
        if (std::abs(d - c.radius) <= 1e-9) continue;  // boundary band
        if (contains(c, y) != (d < c.radius)) ++disagreements;
    }
    CHECK(disagreements == 0);
}

TEST_CASE("dilation") {
    const Capsule c({1, 2, 3}, 0.7, 2.1, normalized(Vec3{0, 1, 1}));
    const Capsule same = dilate(c, 1.0);
    CHECK(same.radius == c.radius);
    CHECK(same.half_length == c.half_length);

    const Capsule ball = Capsule::ball({0, 0, 0}, 1.0);
    const Capsule twice = dilate(ball, 2.0);
    CHECK(twice.radius == 2.0);
    CHECK(twice.half_length == 2.0);

    CHECK_THROWS_AS(dilate(c, 0.5), std::invalid_argument);

    // cubic volume scaling
    for (int i = 0; i < 50; ++i) {
        const Capsule r = random_capsule(102, static_cast<std::uint64_t>(i));
        CHECK(volume(dilate(r, 2.0)) == doctest::Approx(8.0 * volume(r)).epsilon(1e-12));
    }
}

TEST_CASE("dilation monotonicity of membership") {
    for (double lambda : {1.0, 1.5, 10.0}) {
        int violations = 0;
        for (int i = 0; i < 10000; ++i) {
            const Capsule c = random_capsule(103, static_cast<std::uint64_t>(i), 3.0);
            const Vec3 y = c.center + 3.0 * rng::in_unit_ball(104, static_cast<std::uint64_t>(i));
            if (contains(c, y) && !contains(dilate(c, lambda), y)) ++violations;
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("volume closed form") {
    CHECK(volume(Capsule::ball({0, 0, 0}, 1.0)) == doctest::Approx(4.18879020478639).epsilon(1e-12));
    // R=1, L=2: ball plus unit-height cylinder section
    const Capsule c({0, 0, 0}, 1.0, 2.0, kE1);
    CHECK(volume(c) == doctest::Approx(4.0 * M_PI / 3.0 + 2.0 * M_PI).epsilon(1e-12));

    // Monte Carlo cross-check
    const double mc = capsule_integral(c, [](const Vec3&) { return 1.0; },
                                       QuadratureSpec::monte_carlo(1000000, 7));
    CHECK(mc == doctest::Approx(volume(c)).epsilon(0.005));

    // comparability of volume with (full length) * R^2 across aspect ratios:
    // V / (2 L R^2) runs from 2 pi / 3 (ball) up to pi (slender limit)
    for (double L : {1.0, 2.0, 10.0, 100.0}) {
        const double ratio = volume(Capsule({0, 0, 0}, 1.0, L, kE1)) / (2.0 * L);
        CHECK(ratio >= 2.0);
        CHECK(ratio <= 4.2);
    }
}

TEST_CASE("intersection basics") {
    const Capsule a = Capsule::ball({0, 0, 0}, 1.0);
    CHECK(intersects(a, Capsule::ball({1.9, 0, 0}, 1.0)));
    CHECK_FALSE(intersects(a, Capsule::ball({2.1, 0, 0}, 1.0)));

    // parallel capsules offset just past touching
    const Capsule p1({0, 0, 0}, 1.0, 5.0, kE1);
    const Capsule p2({0, 2.001, 0}, 1.0, 5.0, kE1);
    CHECK_FALSE(intersects(p1, p2));
    const Capsule p3({0, 1.999, 0}, 1.0, 5.0, kE1);
    CHECK(intersects(p1, p3));
}

namespace {

// Independent closest-approach distance: coarse 2D grid over the two
// segment parameters, then coordinate-wise golden-section descent on the
// convex quadratic |p(s) - q(t)|^2.
double oracle_pair_distance(const Capsule& a, const Capsule& b) {
    const Vec3 p0 = a.segment_a(), p1 = a.segment_b();
    const Vec3 q0 = b.segment_a(), q1 = b.segment_b();
    auto d2 = [&](double s, double t) {
        return norm2((p0 + s * (p1 - p0)) - (q0 + t * (q1 - q0)));
    };
    double bs = 0.0, bt = 0.0, best = d2(0, 0);
    const int g = 48;
    for (int i = 0; i <= g; ++i)
        for (int j = 0; j <= g; ++j) {
            const double v = d2(double(i) / g, double(j) / g);
            if (v < best) {
                best = v;
                bs = double(i) / g;
                bt = double(j) / g;
            }
        }
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    auto line_min = [&](double fixed, bool s_fixed) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 80; ++it) {
            const double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
            const double f1 = s_fixed ? d2(fixed, x1) : d2(x1, fixed);
            const double f2 = s_fixed ? d2(fixed, x2) : d2(x2, fixed);
            if (f1 < f2)
                hi = x2;
            else
                lo = x1;
        }
        return 0.5 * (lo + hi);
    };
    for (int round = 0; round < 40; ++round) {
        bt = line_min(bs, true);
        bs = line_min(bt, false);
    }
    return std::sqrt(d2(bs, bt));
}

}  // namespace

TEST_CASE("intersection against independent oracles") {
    int disagreements = 0, false_negative = 0;
    for (int i = 0; i < 10000; ++i) {
        const Capsule a = random_capsule(105, static_cast<std::uint64_t>(i), 3.0);
        const Capsule b = random_capsule(106, static_cast<std::uint64_t>(i), 3.0);
        const bool pred = intersects(a, b);
        const double d = oracle_pair_distance(a, b);
        const double sum = a.radius + b.radius;
        if (std::abs(d - sum) > 1e-9 && pred != (d < sum)) ++disagreements;
        // sampled overlap must never contradict a negative prediction
        if (!pred) {
            const Box3 box = a.bounding_box();
            for (int k = 0; k < 200; ++k) {
                const Vec3 y = rng::in_box(rng::derive(107, static_cast<std::uint64_t>(i)),
                                           static_cast<std::uint64_t>(k), box);
                if (contains(a, y) && contains(b, y)) {
                    ++false_negative;
                    break;
                }
            }
        }
    }
    CHECK(disagreements == 0);
    CHECK(false_negative == 0);
}

TEST_CASE("chord length closed form") {
    const double R = 1.0, l = 3.0;
    CHECK(chord_length(R, l, {0, 0, 0}) == doctest::Approx(2.0 * R));
    CHECK(chord_length(R, l, {0, 1.0, 0.5}) == 0.0);   // rho >= R
    CHECK(chord_length(R, l, {l, 0, 0}) == doctest::Approx(R));  // both branches meet

    CHECK_THROWS_AS(chord_length(1.0, 0.5, Vec3{0, 0, 0}), std::invalid_argument);
}

TEST_CASE("chord equals scanned interval measure at 1000 random points") {
    const double R = 1.0, l = 3.0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Vec3 x{(2.0 * rng::uniform(108, static_cast<std::uint64_t>(i), 0) - 1.0) * (l + 2.0),
                     (2.0 * rng::uniform(108, static_cast<std::uint64_t>(i), 1) - 1.0) * 2.0,
                     (2.0 * rng::uniform(108, static_cast<std::uint64_t>(i), 2) - 1.0) * 2.0};
        worst = std::max(worst, std::abs(chord_length(R, l, x) - chord_by_scan(R, l, x)));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("capsule integration") {
    const Capsule c({0, 0, 0}, 1.0, 2.5, normalized(Vec3{1, 1, 0}));
    const QuadratureSpec q = QuadratureSpec::monte_carlo(1000000, 13);

    const double vol = capsule_integral(c, [](const Vec3&) { return 1.0; }, q);
    CHECK(vol == doctest::Approx(volume(c)).epsilon(0.01));

    // odd symmetry along the axis, tolerance from the empirical MC deviation
    const Capsule axial({0, 0, 0}, 1.0, 3.0, kE1);
    const double odd = capsule_integral(axial, [](const Vec3& y) { return y.x; }, q);
    const Box3 abox = axial.bounding_box();
    const double second = capsule_integral(axial, [](const Vec3& y) { return y.x * y.x; }, q);
    const double sigma = std::sqrt(second * abox.volume() / 1e6);
    CHECK(std::abs(odd) <= 4.0 * sigma);

    // |y|^2 over the unit ball = 4 pi / 5
    const double r2 = capsule_integral(Capsule::ball({0, 0, 0}, 1.0),
                                       [](const Vec3& y) { return norm2(y); }, q);
    CHECK(r2 == doctest::Approx(4.0 * M_PI / 5.0).epsilon(0.005));

    CHECK_THROWS_AS(QuadratureSpec::monte_carlo(0, 1), std::invalid_argument);
}

TEST_CASE("sandwich bounds for the t-averaged ball integral") {
    const double R = 1.0;
    auto gaussian = [](const Vec3& y) { return std::exp(-norm2(y - Vec3{0.3, 0.2, -0.1}) / 2.88); };
    for (double l : {2.0, 5.0}) {
        const Capsule inner({0, 0, 0}, R / 2.0, l + R / 2.0, kE1);
        const Capsule outer({0, 0, 0}, R, l + R, kE1);
        const QuadratureSpec q = QuadratureSpec::monte_carlo(400000, 17);
        const double lhs = 0.5 * (std::sqrt(3.0) - 1.0) * R * capsule_integral(inner, gaussian, q);
        const double mid = capsule_integral(
            outer, [&](const Vec3& y) { return gaussian(y) * chord_length(R, l, y); },
            q.with_seed(18));
        const double rhs = 2.0 * R * capsule_integral(outer, gaussian, q.with_seed(19));
        CHECK(lhs <= mid * 1.02);
        CHECK(mid <= rhs * 1.02);
    }
}

TEST_CASE("capsule json round trip") {
    const Capsule c({0.5, -1.5, 2.0}, 0.8, 2.4, normalized(Vec3{1, -1, 2}));
    const Capsule back = capsule_from_json(capsule_to_json(c));
    CHECK(back.center.x == c.center.x);
    CHECK(back.center.y == c.center.y);
    CHECK(back.center.z == c.center.z);
    CHECK(back.radius == c.radius);
    CHECK(back.half_length == c.half_length);
    CHECK(back.axis.x == c.axis.x);
}

TEST_CASE("constructor validation") {
    CHECK_THROWS_AS(Capsule({0, 0, 0}, -1.0, 1.0, kE1), std::invalid_argument);
    CHECK_THROWS_AS(Capsule({0, 0, 0}, 1.0, 0.5, kE1), std::invalid_argument);
    // non-unit axis gets normalized
    const Capsule c({0, 0, 0}, 1.0, 2.0, {2, 0, 0});
    CHECK(norm(c.axis) == doctest::Approx(1.0).epsilon(1e-12));
}
