#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "capflow/maximal.hpp"
#include "capflow/parallel.hpp"
#include "capflow/scalars.hpp"

using namespace capflow;

namespace {

MaximalConfig small_config() {
    MaximalConfig cfg;
    cfg.r_min = 1e-3;
    cfg.r_max = 1.0;
    cfg.n_r = 40;
    cfg.horizon = 1.0;
    cfg.s_min = 1e-3;
    cfg.n_s = 40;
    cfg.ball_quad = QuadratureSpec::monte_carlo(4000, 77);
    cfg.flow_step = 1.0 / 64.0;
    return cfg;
}

// |B_r1(0) cap B_r2(c)| for spheres at distance d (lens closed form).
double lens_volume(double r1, double r2, double d) {
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return 4.0 * M_PI / 3.0 * r * r * r;
    }
    return M_PI * std::pow(r1 + r2 - d, 2) *
           (d * d + 2.0 * d * (r1 + r2) - 3.0 * std::pow(r1 - r2, 2)) / (12.0 * d);
}

}  // namespace

TEST_CASE("classical maximal of a constant") {
    const MaximalConfig cfg = small_config();
    const double v = classical_maximal(scalars::constant(3.5), {0.2, 0.1, 0}, cfg);
    CHECK(v == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("classical maximal of |y| at the origin") {
    // ball average of |y| over B_r is 3r/4, maximized at r_max = 1.
    MaximalConfig cfg = small_config();
    cfg.ball_quad = QuadratureSpec::monte_carlo(200000, 78);
    const double v = classical_maximal([](const Vec3& y) { return norm(y); }, {0, 0, 0}, cfg);
    CHECK(v == doctest::Approx(0.75).epsilon(0.01));
}

TEST_CASE("classical maximal of an indicator vs the dense-radius oracle") {
    // f ~ 1_{B_1(0)}, evaluated at distance 2: the oracle maximizes the
    // lens-to-ball volume ratio over a dense radius grid.
    MaximalConfig cfg = small_config();
    cfg.r_min = 0.05;
    cfg.r_max = 20.0;
    cfg.n_r = 80;
    cfg.ball_quad = QuadratureSpec::monte_carlo(200000, 79);
    const Vec3 x{2.0, 0.0, 0.0};
    const double ours =
        classical_maximal(scalars::smoothed_indicator({0, 0, 0}, 1.0, 0.01), x, cfg);
    double oracle = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double r = 0.05 + (20.0 - 0.05) * i / 4000.0;
        oracle = std::max(oracle, lens_volume(1.0, r, 2.0) / (4.0 * M_PI / 3.0 * r * r * r));
    }
    CHECK(ours == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("classical maximal is monotone in the integrand") {
    const MaximalConfig cfg = small_config();
    const ScalarFn f = scalars::gaussian_bump({0, 0, 0}, 0.7, 1.0);
    const ScalarFn g = [](const Vec3& y) {
        return std::exp(-norm2(y) / (2.0 * 0.49)) + 0.2;  // f + 0.2 pointwise
    };
    for (int i = 0; i < 10; ++i) {
        const Vec3 x = rng::in_unit_ball(80, static_cast<std::uint64_t>(i));
        // shared sampling stream: dominance survives quadrature exactly
        CHECK(classical_maximal(f, x, cfg) <= classical_maximal(g, x, cfg));
    }
}

TEST_CASE("streamwise maximal with zero field returns |f(x)|") {
    const MaximalConfig cfg = small_config();
    const FlowMap still(VectorField::constant(0.0), cfg.flow_step);
    const ScalarFn f = scalars::gaussian_bump({0.3, 0, 0}, 0.5);
    for (int i = 0; i < 10; ++i) {
        const Vec3 x = rng::in_unit_ball(81, static_cast<std::uint64_t>(i));
        CHECK(streamwise_maximal(f, still, x, cfg) ==
              doctest::Approx(std::abs(f(x))).epsilon(1e-10));
    }
}

TEST_CASE("streamwise maximal of a constant under any flow") {
    const MaximalConfig cfg = small_config();
    const FlowMap abc(VectorField::abc(1, 1, 1), cfg.flow_step);
    const double v = streamwise_maximal(scalars::constant(2.25), abc, {0.1, 0.2, 0.3}, cfg);
    CHECK(v == doctest::Approx(2.25).epsilon(1e-10));
}

TEST_CASE("streamwise maximal matches the 1D oracle on constant drift") {
    const double U = 2.0;
    MaximalConfig cfg = small_config();
    cfg.n_s = 60;
    const FlowMap map(VectorField::constant(U), cfg.flow_step);
    const ScalarFn f = scalars::gaussian_bump({0.2, 0, 0}, 0.5);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Vec3 x = 1.2 * rng::in_unit_ball(82, static_cast<std::uint64_t>(i));
        const double ours = streamwise_maximal(f, map, x, cfg);
        double oracle = 0.0;
        const int fine = 4096;
        const double wmax = cfg.horizon * U;
        std::vector<double> g(fine + 1), cum(fine + 1, 0.0);
        for (int j = 0; j <= fine; ++j) {
            const double t = wmax * j / fine;
            g[static_cast<std::size_t>(j)] =
                std::abs(f(x + Vec3{t, 0, 0})) + std::abs(f(x - Vec3{t, 0, 0}));
        }
        for (int j = 1; j <= fine; ++j)
            cum[static_cast<std::size_t>(j)] =
                cum[static_cast<std::size_t>(j - 1)] +
                0.5 * (wmax / fine) *
                    (g[static_cast<std::size_t>(j - 1)] + g[static_cast<std::size_t>(j)]);
        for (int j = 1; j <= fine; ++j)
            oracle = std::max(oracle, cum[static_cast<std::size_t>(j)] / (2.0 * wmax * j / fine));
        worst = std::max(worst, std::abs(ours - oracle) / oracle);
    }
    CHECK(worst <= 0.05);
}

TEST_CASE("streamwise maximal dominates |f| up to window slack") {
    MaximalConfig cfg = small_config();
    const ScalarFn f = scalars::gaussian_bump({0, 0, 0}, 0.8);
    const double lip = std::exp(-0.5) / 0.8;
    const VectorField fields[] = {VectorField::shear(), VectorField::rotation({0, 0, 1}),
                                  VectorField::gaussian_curl({0, 0, 1}, 1.0)};
    for (const auto& u : fields) {
        const FlowMap map(u, cfg.flow_step);
        for (int i = 0; i < 20; ++i) {
            const Vec3 x = 1.5 * rng::in_unit_ball(83, static_cast<std::uint64_t>(i));
            const double window = std::max(cfg.s_min, cfg.horizon / 64.0);
            const double slack = lip * std::max(norm(u.value(x)), 1.0) * window + 1e-12;
            CHECK(streamwise_maximal(f, map, x, cfg) >= std::abs(f(x)) - slack);
        }
    }
}

TEST_CASE("composite scale vanishes for constant fields") {
    MaximalConfig cfg = small_config();
    cfg.n_r = 10;
    cfg.n_s = 8;
    cfg.ball_quad = QuadratureSpec::monte_carlo(64, 84);
    const double xi2 = xi_tilde_squared(VectorField::constant(3.0), Capsule::ball({0, 0, 0}, 1.0),
                                        cfg, QuadratureSpec::monte_carlo(128, 85));
    CHECK(xi2 <= 1e-10);
}

TEST_CASE("composite scale fixes constants: shear field") {
    MaximalConfig cfg = small_config();
    cfg.n_r = 12;
    cfg.n_s = 8;
    cfg.ball_quad = QuadratureSpec::monte_carlo(64, 86);
    cfg.flow_step = 1.0 / 16.0;
    const double xi2 = xi_tilde_squared(VectorField::shear(), Capsule::ball({0, 0, 0}, 1.0), cfg,
                                        QuadratureSpec::monte_carlo(128, 87));
    CHECK(xi2 == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("composite scale dominates the plain Dirichlet average") {
    MaximalConfig cfg = small_config();
    cfg.n_r = 16;
    cfg.r_min = 0.01;
    cfg.r_max = 4.0;
    cfg.n_s = 10;
    cfg.ball_quad = QuadratureSpec::monte_carlo(128, 88);
    cfg.flow_step = 1.0 / 16.0;
    const VectorField f = VectorField::gaussian_curl({0, 0, 1}, 1.0);
    const Capsule ball = Capsule::ball({0, 0, 0}, 1.0);
    const QuadratureSpec q = QuadratureSpec::monte_carlo(512, 89);
    const double xi2 = xi_tilde_squared(f, ball, cfg, q);
    const double dirichlet = capsule_average(
        ball, [&](const Vec3& y) { return f.gradient(y).frobenius2(); }, q);
    CHECK(xi2 >= dirichlet * (1.0 - 0.01));
}

TEST_CASE("weak norm of an indicator") {
    const Box3 box{{-2, -2, -2}, {2, 2, 2}};
    const double m = 4.0 * M_PI / 3.0;
    const WeakNormEstimate est =
        weak_norm(scalars::smoothed_indicator({0, 0, 0}, 1.0, 1e-6), 2.0, box,
                  ThresholdSpec::explicit_levels({0.2, 0.5, 0.9, 0.999}),
                  QuadratureSpec::monte_carlo(400000, 90));
    CHECK(est.value == doctest::Approx(std::sqrt(m)).epsilon(0.03));
}

TEST_CASE("weak norm of the power-law reference") {
    const Box3 box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
    const double p = 2.0;
    const WeakNormEstimate est =
        weak_norm(scalars::power_law(p), p, box, ThresholdSpec::log_spaced(1.0, 6.0, 14),
                  QuadratureSpec::monte_carlo(600000, 91));
    CHECK(est.value == doctest::Approx(std::sqrt(4.0 * M_PI / 3.0)).epsilon(0.05));
    for (std::size_t i = 1; i < est.measures.size(); ++i)
        CHECK(est.measures[i] <= est.measures[i - 1]);
}

TEST_CASE("weak norm of zero") {
    const WeakNormEstimate est =
        weak_norm(scalars::constant(0.0), 2.0, {{-1, -1, -1}, {1, 1, 1}},
                  ThresholdSpec::log_spaced(0.1, 10.0, 8), QuadratureSpec::monte_carlo(10000, 92));
    CHECK(est.value == 0.0);
}

TEST_CASE("weak norm rejects an empty threshold grid") {
    CHECK_THROWS_AS(weak_norm(scalars::constant(1.0), 2.0, {{-1, -1, -1}, {1, 1, 1}},
                              ThresholdSpec{}, QuadratureSpec::monte_carlo(100, 9)),
                    std::invalid_argument);
}

TEST_CASE("streamline proximity") {
    // exact translation carries the ball onto the target
    const FlowMap drift(VectorField::constant(2.0), 0.05);
    const double f1 = streamline_proximity(drift, 1.0, 0.0, 3.0, 2.0, 100000, 93);
    CHECK(f1 == doctest::Approx(1.0).epsilon(0.01));

    // zero field at separation R: symmetric lens fraction
    //   1 - (3/4)(d/R)(1 - d^2/(12 R^2)) = 5/16 at d = R
    const FlowMap still(VectorField::constant(0.0), 0.05);
    const double lens = 1.0 - 0.75 * (1.0 - 1.0 / 12.0);
    CHECK(lens == doctest::Approx(5.0 / 16.0).epsilon(1e-15));
    const double f2 = streamline_proximity(still, 1.0, 0.0, 1.0, 1.0, 100000, 94);
    CHECK(f2 == doctest::Approx(lens).epsilon(0.02));

    // disjoint balls
    const double f3 = streamline_proximity(still, 1.0, 0.0, 2.5, 1.0, 100000, 95);
    CHECK(f3 == 0.0);

    CHECK_THROWS_AS(streamline_proximity(still, 1.0, 0.0, 1.0, 0.0, 100000, 96),
                    std::invalid_argument);
    CHECK_THROWS_AS(streamline_proximity(still, 1.0, 0.0, 1.0, 1.0, 10, 97),
                    std::invalid_argument);
}

TEST_CASE("dirichlet comparison on the shear field") {
    MaximalConfig cfg = small_config();
    cfg.n_r = 12;
    cfg.n_s = 8;
    cfg.ball_quad = QuadratureSpec::monte_carlo(256, 98);
    cfg.flow_step = 1.0 / 16.0;
    const DirichletComparison cmp =
        dirichlet_comparison(VectorField::shear(), Capsule::ball({0, 0, 0}, 1.0), cfg);
    CHECK_FALSE(cmp.degenerate);
    CHECK(cmp.ratio == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("dirichlet comparison detects the degenerate case") {
    MaximalConfig cfg = small_config();
    cfg.n_r = 6;
    cfg.n_s = 6;
    cfg.ball_quad = QuadratureSpec::monte_carlo(64, 99);
    const DirichletComparison cmp =
        dirichlet_comparison(VectorField::constant(1.0), Capsule::ball({0, 0, 0}, 1.0), cfg);
    CHECK(cmp.degenerate);
}

TEST_CASE("dirichlet comparison bounded on the decaying field") {
    MaximalConfig cfg = small_config();
    cfg.n_r = 12;
    cfg.r_min = 0.02;
    cfg.r_max = 4.0;
    cfg.n_s = 8;
    cfg.ball_quad = QuadratureSpec::monte_carlo(128, 100);
    cfg.flow_step = 1.0 / 16.0;
    const DirichletComparison cmp = dirichlet_comparison(
        VectorField::gaussian_curl({0, 0, 1}, 1.0), Capsule::ball({0, 0, 0}, 1.0), cfg);
    CHECK_FALSE(cmp.degenerate);
    CHECK(cmp.ratio > 0.0);
    CHECK(cmp.ratio <= 20.0);
}

TEST_CASE("empirical strong (2,2) bound") {
    MaximalConfig cfg;
    cfg.horizon = 1.0;
    cfg.s_min = 1e-2;
    cfg.n_s = 30;
    cfg.flow_step = 1.0 / 24.0;
    const Box3 support{{-2, -2, -2}, {2, 2, 2}};
    const FlowMap map(VectorField::rotation({0, 0, 1}), cfg.flow_step);
    const double ratio =
        strong_pp_ratio(scalars::gaussian_bump({0.5, 0, 0}, 0.6), map, support, 2.0, cfg, 10);
    CHECK(ratio <= 5.0);
    CHECK(ratio >= 0.5);  // averages cannot lose most of the mass either
}

TEST_CASE("serial and parallel paths agree bit for bit") {
    MaximalConfig cfg = small_config();
    cfg.n_r = 8;
    cfg.n_s = 6;
    cfg.ball_quad = QuadratureSpec::monte_carlo(128, 101);
    cfg.flow_step = 1.0 / 8.0;
    const VectorField f = VectorField::gaussian_curl({0, 0, 1}, 1.0);
    const Capsule ball = Capsule::ball({0.2, 0, 0}, 0.8);
    const QuadratureSpec q = QuadratureSpec::monte_carlo(256, 102);
    double serial, parallel;
    {
        par::ScopedMode guard(par::Mode::Serial);
        serial = xi_tilde_squared(f, ball, cfg, q);
    }
    {
        par::ScopedMode guard(par::Mode::OpenMP);
        parallel = xi_tilde_squared(f, ball, cfg, q);
    }
    CHECK(serial == parallel);
}
