#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capflow/construction.hpp"
#include "capflow/functionals.hpp"
#include "capflow/rng.hpp"

using namespace capflow;

namespace {

// degree-2 polynomial vector field with random coefficients
VectorField random_poly(std::uint64_t seed, std::uint64_t trial) {
    std::array<double, 12> c{};
    for (std::size_t k = 0; k < c.size(); ++k)
        c[k] = 2.0 * rng::uniform(seed, trial, k) - 1.0;
    return VectorField::from_callable([c](const Vec3& y) {
        return Vec3{c[0] + c[1] * y.x + c[2] * y.y * y.z + c[3] * y.y,
                    c[4] + c[5] * y.y + c[6] * y.x * y.x + c[7] * y.z,
                    c[8] + c[9] * y.z + c[10] * y.x * y.y + c[11] * y.x};
    });
}

}  // namespace

TEST_CASE("line integral of a constant field") {
    const VectorField u = VectorField::constant(1.5);
    const double L = 4.0;
    const double v = line_integral(u, {-L, 0, 0}, {L, 0, 0});
    CHECK(v == doctest::Approx(2.0 * L * 1.5).epsilon(1e-14));
}

TEST_CASE("line integral of a gradient field is a potential difference") {
    // u = grad(x1 x2)
    const VectorField u = VectorField::from_callable(
        [](const Vec3& y) { return Vec3{y.y, y.x, 0.0}; });
    const double v = line_integral(u, {0, 0, 0}, {1, 1, 0});
    CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
    const double w = line_integral(u, {0.5, -1, 2}, {2, 0.25, -1});
    CHECK(w == doctest::Approx(2.0 * 0.25 - 0.5 * (-1.0)).epsilon(1e-10));
}

TEST_CASE("line integral along a radius of a rotation vanishes") {
    const VectorField u = VectorField::rotation({0, 0, 1});
    const double v = line_integral(u, {0, 0, 0}, {2, 1, 0});
    CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("line integral is additive under collinear splitting") {
    const VectorField u = VectorField::abc(1, 1, 1);
    const Vec3 a{-1, 0.3, 0.2}, c{2, -0.4, 1.0};
    const Vec3 b = a + 0.37 * (c - a);
    const double whole = line_integral(u, a, c, 32);
    const double split = line_integral(u, a, b, 32) + line_integral(u, b, c, 32);
    CHECK(std::abs(whole - split) <= 1e-10 * std::max(1.0, std::abs(whole)));
}

TEST_CASE("line integral rejects degenerate panel counts") {
    CHECK_THROWS_AS(line_integral(VectorField::constant(1.0), {0, 0, 0}, {1, 0, 0}, 1),
                    std::invalid_argument);
}

TEST_CASE("comparability ratio on synthetic capsules") {
    // constant field: ratio exactly 1
    const Capsule c({0, 0, 0}, 1.0, 10.0, kE1);
    const double one = line_integral_comparability(VectorField::constant(1.0), c, 1.0);
    CHECK(one == doctest::Approx(1.0).epsilon(1e-12));

    // small perturbation
    const VectorField pert = VectorField::from_callable([](const Vec3& y) {
        return Vec3{1.0 + 0.01 * std::sin(y.x), 0.0, 0.0};
    });
    const double near_one = line_integral_comparability(pert, c, 1.0);
    CHECK(near_one >= 0.99);
    CHECK(near_one <= 1.01);

    // adversarial oscillation at the permitted amplitude 0.4 U
    const double L = c.half_length;
    const VectorField adv = VectorField::from_callable([L](const Vec3& y) {
        return Vec3{1.0 + 0.4 * std::sin(M_PI * y.x / L), 0.0, 0.0};
    });
    const double swing = line_integral_comparability(adv, c, 1.0);
    CHECK(swing >= 0.6);
    CHECK(swing <= 1.4);
}

TEST_CASE("comparability requires a long capsule") {
    ConstructedCapsule cc;
    cc.capsule = Capsule::ball({0, 0, 0}, 1.0);
    cc.classification = PointClass::Round;
    cc.speed = 1.0;
    CHECK_THROWS_AS(line_integral_comparability(VectorField::constant(1.0), cc),
                    std::invalid_argument);
}

TEST_CASE("mean oscillation of a constant potential vanishes") {
    const VectorField psi = VectorField::constant_vec({1.0, -2.0, 0.5});
    const double v = mean_oscillation(psi, {0, 0, 0}, 1.0, 2.0, QuadratureSpec::tensor(10));
    CHECK(v <= 1e-13);
}

TEST_CASE("mean oscillation of the identity potential") {
    // psi(y) = y about x0 = 0: (avg |y|^2)^(1/2) = R sqrt(3/5)
    const VectorField psi = VectorField::from_callable([](const Vec3& y) { return y; });
    const double v = mean_oscillation(psi, {0, 0, 0}, 1.0, 2.0, QuadratureSpec::tensor(12));
    CHECK(v == doctest::Approx(std::sqrt(3.0 / 5.0)).epsilon(0.005));
}

TEST_CASE("mean oscillation is monotone in the exponent") {
    const VectorField psi = random_poly(201, 0);
    const QuadratureSpec q = QuadratureSpec::tensor(10);
    const double v1 = mean_oscillation(psi, {0.1, 0, 0}, 1.2, 1.0, q);
    const double v2 = mean_oscillation(psi, {0.1, 0, 0}, 1.2, 2.0, q);
    CHECK(v1 <= v2 * (1.0 + 1e-12));
}

TEST_CASE("mean oscillation ignores constant shifts") {
    const VectorField psi = random_poly(202, 1);
    const Vec3 shift{3.0, -1.0, 2.0};
    const VectorField shifted = VectorField::from_callable(
        [psi, shift](const Vec3& y) { return psi.value(y) + shift; });
    const QuadratureSpec q = QuadratureSpec::tensor(10);
    const double a = mean_oscillation(psi, {0, 0.2, 0}, 0.9, 2.0, q);
    const double b = mean_oscillation(shifted, {0, 0.2, 0}, 0.9, 2.0, q);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, a));
}

TEST_CASE("stream moment of a constant potential vanishes") {
    const VectorField psi = VectorField::constant_vec({0.3, 0.7, -0.2});
    CHECK(std::abs(stream_moment(psi, {0, 0, 0}, 1.0, kE1, QuadratureSpec::tensor(10))) <= 1e-13);
}

TEST_CASE("stream moment equals its by-parts form on polynomials") {
    const QuadratureSpec q = QuadratureSpec::tensor(12);
    // psi = (0, 0, x1 x2): both sides vanish by parity
    const VectorField psi0 = VectorField::from_callable(
        [](const Vec3& y) { return Vec3{0.0, 0.0, y.x * y.y}; },
        [](const Vec3& y) {
            Mat3 g;
            g(2, 0) = y.y;
            g(2, 1) = y.x;
            return g;
        });
    const double lhs0 = stream_moment(psi0, {0, 0, 0}, 1.0, kE1, q);
    const double rhs0 = stream_moment_by_parts(psi0, {0, 0, 0}, 1.0, q);
    CHECK(std::abs(lhs0) <= 1e-12);
    CHECK(std::abs(rhs0) <= 1e-12);

    // psi = (0, 0, y2 (1 + y1^2)): both sides strictly positive and equal
    const VectorField psi1 = VectorField::from_callable(
        [](const Vec3& y) { return Vec3{0.0, 0.0, y.y * (1.0 + y.x * y.x)}; },
        [](const Vec3& y) {
            Mat3 g;
            g(2, 0) = 2.0 * y.x * y.y;
            g(2, 1) = 1.0 + y.x * y.x;
            return g;
        });
    const double lhs1 = stream_moment(psi1, {0, 0, 0}, 1.0, kE1, q);
    const double rhs1 = stream_moment_by_parts(psi1, {0, 0, 0}, 1.0, q);
    CHECK(lhs1 > 0.0);
    CHECK(std::abs(lhs1 - rhs1) <= 1e-6 * std::abs(rhs1));
}

TEST_CASE("stream moment of a constant-drift potential") {
    // curl psi = U e1 gives (4 pi / 15) U R^5
    const double U = 1.0, R = 1.0;
    const VectorField psi = VectorField::from_callable(
        [U](const Vec3& y) { return Vec3{0.0, 0.0, U * y.y}; });
    const double v = stream_moment(psi, {0, 0, 0}, R, kE1, QuadratureSpec::tensor(12));
    CHECK(v == doctest::Approx(4.0 * M_PI / 15.0 * U * std::pow(R, 5)).epsilon(0.005));
}

TEST_CASE("stream moment sign flips with the axis") {
    const VectorField psi = random_poly(203, 2);
    const QuadratureSpec q = QuadratureSpec::tensor(10);
    const double plus = stream_moment(psi, {0.2, -0.1, 0}, 1.1, kE2, q);
    const double minus = stream_moment(psi, {0.2, -0.1, 0}, 1.1, -1.0 * kE2, q);
    CHECK(std::abs(plus + minus) <= 1e-12 * std::max(1.0, std::abs(plus)));
}

TEST_CASE("stream moment ignores constant shifts") {
    const VectorField psi = random_poly(204, 3);
    const Vec3 shift{-2.0, 0.5, 1.0};
    const VectorField shifted = VectorField::from_callable(
        [psi, shift](const Vec3& y) { return psi.value(y) + shift; });
    const QuadratureSpec q = QuadratureSpec::tensor(10);
    const double a = stream_moment(psi, {0, 0, 0}, 1.0, kE1, q);
    const double b = stream_moment(shifted, {0, 0, 0}, 1.0, kE1, q);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
}

TEST_CASE("stream moment controlled by the mean oscillation") {
    const QuadratureSpec q = QuadratureSpec::tensor(10);
    const double R = 1.3, s = 2.0;
    for (int trial = 0; trial < 20; ++trial) {
        const VectorField psi = random_poly(205, static_cast<std::uint64_t>(trial));
        const double lhs = std::abs(stream_moment(psi, {0, 0, 0}, R, kE1, q));
        const double osc = mean_oscillation(psi, {0, 0, 0}, R, s, q);
        const double bound = 4.0 * M_PI / 3.0 * R * R * R * R * osc;
        CHECK(lhs <= bound * (1.0 + 1e-9));
    }
}

TEST_CASE("threshold arithmetic is exact") {
    const ThresholdResults a = thresholds({Rational(1, 9), Rational(0), 1.0, {}, {}});
    CHECK(a.p_alpha == Rational(9, 2));
    CHECK(a.alpha_crit == Rational(1, 9));

    const ThresholdResults b = thresholds({Rational(0), Rational(29, 193), 1.0, {}, {}});
    CHECK(b.p_beta == Rational(9, 2));
    CHECK(b.beta_crit == Rational(29, 193));

    const ThresholdResults zero = thresholds({Rational(0), Rational(0), 1.0, {}, {}});
    CHECK(zero.p_alpha == Rational(4));
    CHECK(zero.p_beta == Rational(4));

    CHECK_THROWS_AS(thresholds({Rational(1), Rational(0), 1.0, {}, {}}), std::invalid_argument);
    CHECK_THROWS_AS(p_alpha(1.0), std::invalid_argument);
    CHECK_THROWS_AS(p_beta(2.0), std::invalid_argument);
    CHECK(p_alpha(0.0) == 4.0);
}

TEST_CASE("competitor exponents") {
    const CompetitorExponents e9 = competitor_exponents(9.0);
    CHECK(e9.seregin == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
    const CompetitorExponents e6 = competitor_exponents(6.0);
    CHECK(e6.chae_wolf == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK_THROWS_AS(competitor_exponents(3.0), std::invalid_argument);

    CHECK(seregin_alpha(Rational(9)) == Rational(1, 8));
    CHECK(chae_wolf_alpha(Rational(6)) == Rational(1, 6));
}

TEST_CASE("threshold crossovers") {
    CHECK(seregin_crossover() == Rational(7));
    CHECK(chae_wolf_crossover() == Rational(9, 2));
    // the first competitor dips below 1/9 exactly below s = 7
    CHECK(competitor_exponents(7.0 - 1e-9).seregin < 1.0 / 9.0);
    CHECK(competitor_exponents(7.0 + 1e-9).seregin > 1.0 / 9.0);
}

TEST_CASE("rational arithmetic basics") {
    CHECK(Rational(4) / (Rational(1) - Rational(1, 9)) == Rational(9, 2));
    CHECK((Rational(3, 4) * Rational(8, 9)) == Rational(2, 3));
    CHECK(Rational(-6, -8) == Rational(3, 4));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}
