// Serial vs OpenMP timing for the data-parallel kernels.  The serial path
// is the reference implementation the tests compare against; both paths use
// the same fixed-block reductions, so their results agree bit for bit and
// only the wall time differs.

#include <chrono>
#include <cstdio>
#include <functional>

#include "capflow/construction.hpp"
#include "capflow/covering.hpp"
#include "capflow/maximal.hpp"
#include "capflow/oseen.hpp"
#include "capflow/parallel.hpp"
#include "capflow/scalars.hpp"

using namespace capflow;

namespace {

double time_ms(const std::function<double()>& body, double* result) {
    const auto t0 = std::chrono::steady_clock::now();
    *result = body();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void run_case(const char* name, const std::function<double()>& body) {
    double serial_result = 0.0, omp_result = 0.0;
    double serial_ms, omp_ms;
    {
        par::ScopedMode guard(par::Mode::Serial);
        serial_ms = time_ms(body, &serial_result);
    }
    {
        par::ScopedMode guard(par::Mode::OpenMP);
        omp_ms = time_ms(body, &omp_result);
    }
    const bool identical = serial_result == omp_result;
    std::printf("%-34s %10.1f ms %10.1f ms   x%4.2f   %s\n", name, serial_ms, omp_ms,
                serial_ms / omp_ms, identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
    std::printf("%-34s %13s %13s %7s\n", "kernel", "serial", "openmp", "speedup");
    std::printf("threads available: %d\n", par::max_threads());

    const VectorField gauss = VectorField::gaussian_curl({0, 0, 1}, 1.0);
    const Capsule ball = Capsule::ball({0, 0, 0}, 1.0);
    const Capsule longcap({0, 0, 0}, 1.0, 4.0, kE1);

    run_case("capsule MC integral (4e6 samples)", [&] {
        return capsule_integral(
            longcap, [&](const Vec3& y) { return gauss.gradient(y).frobenius2(); },
            QuadratureSpec::monte_carlo(4000000, 7));
    });

    run_case("composite maximal average", [&] {
        MaximalConfig cfg;
        cfg.n_r = 20;
        cfg.r_min = 0.05;
        cfg.r_max = 5.0;
        cfg.ball_quad = QuadratureSpec::monte_carlo(64, 3);
        cfg.horizon = 0.5;
        cfg.n_s = 12;
        cfg.flow_step = 0.125;
        return xi_tilde_squared(gauss, ball, cfg, QuadratureSpec::monte_carlo(256, 5));
    });

    run_case("biot-savart, 17^3 targets", [&] {
        const BiotSavartOperator op(gauss, Capsule::ball({0, 0, 0}, 2.5), QuadratureSpec::tensor(20));
        double acc = 0.0;
        const int n = 17;
        for (int iz = 0; iz < n; ++iz)
            for (int iy = 0; iy < n; ++iy)
                for (int ix = 0; ix < n; ++ix) {
                    const Vec3 x{-1.0 + 2.0 * ix / (n - 1), -1.0 + 2.0 * iy / (n - 1),
                                 -1.0 + 2.0 * iz / (n - 1)};
                    acc += norm(op(x));
                }
        return acc;
    });

    run_case("weak-norm sampling (2e6 points)", [&] {
        const WeakNormEstimate est =
            weak_norm(scalars::power_law(2.0), 2.0, {{-2, -2, -2}, {2, 2, 2}},
                      ThresholdSpec::log_spaced(1.0, 10.0, 16),
                      QuadratureSpec::monte_carlo(2000000, 9));
        return est.value;
    });

    run_case("classify 27 lattice points", [&] {
        std::vector<Vec3> pts;
        for (int iz = -1; iz <= 1; ++iz)
            for (int iy = -1; iy <= 1; ++iy)
                for (int ix = -1; ix <= 1; ++ix) pts.push_back({0.4 * ix, 0.4 * iy, 0.4 * iz});
        CapsuleParams params;
        params.scan_points = 40;
        params.r_lo = 0.01;
        params.r_hi = 10.0;
        params.root_tol_rel = 1e-4;
        MaximalConfig cfg;
        cfg.n_r = 10;
        cfg.r_min = 0.05;
        cfg.r_max = 5.0;
        cfg.ball_quad = QuadratureSpec::monte_carlo(32, 3);
        cfg.horizon = 0.5;
        cfg.n_s = 8;
        cfg.flow_step = 0.25;
        const ClassifiedPoints cp =
            classify_points(gauss, pts, params, cfg, QuadratureSpec::monte_carlo(128, 11));
        double acc = 0.0;
        for (const auto& cc : cp.capsules) acc += cc.capsule.radius;
        return acc;
    });

    return 0;
}
