#include "capflow/maximal.hpp"

#include <algorithm>
#include <cmath>

#include "capflow/parallel.hpp"

namespace capflow {

double composed_maximal(const VectorField& field, const FlowMap& map, const Vec3& x,
                        const MaximalConfig& cfg) {
    auto dirichlet_density = [&](const Vec3& y) { return field.gradient(y).frobenius2(); };
    auto inner = [&](const Vec3& y) { return classical_maximal(dirichlet_density, y, cfg); };
    return streamwise_maximal(inner, map, x, cfg);
}

double xi_tilde_squared(const VectorField& field, const Capsule& c, const MaximalConfig& cfg,
                        const QuadratureSpec& q) {
    cfg.validate();
    const FlowMap map(field, cfg.flow_step);
    return capsule_average(
        c, [&](const Vec3& y) { return composed_maximal(field, map, y, cfg); }, q);
}

WeakNormEstimate weak_norm(const ScalarFn& f, double p, const Box3& box, const ThresholdSpec& grid,
                           const QuadratureSpec& q) {
    if (!(p > 0.0)) throw std::invalid_argument("weak_norm: exponent must be positive");
    if (grid.levels.empty()) throw std::invalid_argument("weak_norm: empty threshold grid");
    q.validate();
    if (q.mode != QuadratureSpec::Mode::MonteCarlo)
        throw std::invalid_argument("weak_norm: Monte Carlo quadrature required");
    const std::int64_t n = q.samples;
    std::vector<double> values(static_cast<std::size_t>(n));
    par::for_index(n, [&](std::int64_t i) {
        values[static_cast<std::size_t>(i)] = f(rng::in_box(q.seed, static_cast<std::uint64_t>(i), box));
    });
    std::sort(values.begin(), values.end());
    const double vol = box.volume();
    WeakNormEstimate est;
    est.p = p;
    est.thresholds = grid.levels;
    est.measures.reserve(grid.levels.size());
    est.value = 0.0;
    for (double alpha : grid.levels) {
        const auto above = values.end() - std::upper_bound(values.begin(), values.end(), alpha);
        const double measure = vol * static_cast<double>(above) / static_cast<double>(n);
        est.measures.push_back(measure);
        est.value = std::max(est.value, alpha * std::pow(measure, 1.0 / p));
    }
    return est;
}

WeakNormEstimate weak_norm_from_samples(std::vector<double> values, double p, double box_volume,
                                        int n_thresholds) {
    if (!(p > 0.0)) throw std::invalid_argument("weak_norm_from_samples: exponent must be positive");
    if (values.empty()) throw std::invalid_argument("weak_norm_from_samples: no samples");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    WeakNormEstimate est;
    est.p = p;
    // sup over order statistics: level just below the k-th largest value has
    // measure (k/n) * volume.
    est.value = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double level = values[n - k];
        if (level <= 0.0) continue;
        const double measure = box_volume * static_cast<double>(k) / static_cast<double>(n);
        est.value = std::max(est.value, level * std::pow(measure, 1.0 / p));
    }
    // Report measures on a quantile grid of the observed positive range.
    const int m = std::max(1, n_thresholds);
    for (int j = 0; j < m; ++j) {
        const std::size_t idx = static_cast<std::size_t>(
            std::min<double>(static_cast<double>(n - 1), (n - 1) * (double(j) / m)));
        const double alpha = std::nextafter(values[idx], 0.0);  // just below the sample
        if (alpha <= 0.0) continue;
        const auto above = values.end() - std::upper_bound(values.begin(), values.end(), alpha);
        est.thresholds.push_back(alpha);
        est.measures.push_back(box_volume * static_cast<double>(above) / static_cast<double>(n));
    }
    return est;
}

double streamline_proximity(const FlowMap& map, double R, double t0, double t1, double U,
                            std::int64_t n, std::uint64_t seed) {
    if (!(U > 0.0)) throw std::invalid_argument("streamline_proximity: drift speed must be positive");
    if (n < 1000) throw std::invalid_argument("streamline_proximity: need at least 1000 samples");
    if (!(R > 0.0)) throw std::invalid_argument("streamline_proximity: radius must be positive");
    const double dt = (t1 - t0) / U;
    const Vec3 c0{t0, 0.0, 0.0}, c1{t1, 0.0, 0.0};
    std::int64_t hits = 0, exits = 0;
#ifdef _OPENMP
    const bool par_here = par::mode() == par::Mode::OpenMP && !omp_in_parallel();
    #pragma omp parallel for schedule(static) reduction(+ : hits, exits) if (par_here)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        const Vec3 x = rng::in_ball(seed, static_cast<std::uint64_t>(i), c0, R);
        try {
            const Vec3 y = map.flow(x, dt);
            if (norm(y - c1) < R) ++hits;
        } catch (const DomainError&) {
            ++exits;
        }
    }
    if (exits > 0) {
        const double frac = static_cast<double>(exits) / static_cast<double>(n);
        throw DomainError("streamline_proximity: " + std::to_string(frac * 100.0) +
                              "% of trajectories left the field domain",
                          frac);
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

DirichletComparison dirichlet_comparison(const VectorField& field, const Capsule& c,
                                         const MaximalConfig& cfg) {
    cfg.validate();
    DirichletComparison out;
    const Capsule twice = dilate(c, 2.0);
    out.numerator = capsule_average(
        twice, [&](const Vec3& y) { return field.gradient(y).frobenius2(); }, cfg.ball_quad);
    out.denominator = xi_tilde_squared(field, c, cfg, cfg.ball_quad);
    if (out.denominator <= 1e-300) {
        out.degenerate = true;
        out.ratio = 0.0;
    } else {
        out.ratio = out.numerator / out.denominator;
    }
    return out;
}

double strong_pp_ratio(const ScalarFn& f, const FlowMap& map, const Box3& support_box, double p,
                       const MaximalConfig& cfg, int lattice_n) {
    cfg.validate();
    if (!(p > 1.0)) throw std::invalid_argument("strong_pp_ratio: exponent must exceed 1");
    // Grow the box by the maximal travel distance over one horizon.
    double umax = 0.0;
    const int ns = 8;
    for (int iz = 0; iz < ns; ++iz)
        for (int iy = 0; iy < ns; ++iy)
            for (int ix = 0; ix < ns; ++ix) {
                const Vec3 e = support_box.extent();
                const Vec3 x{support_box.lo.x + e.x * (ix + 0.5) / ns,
                             support_box.lo.y + e.y * (iy + 0.5) / ns,
                             support_box.lo.z + e.z * (iz + 0.5) / ns};
                umax = std::max(umax, norm(map.field().value(x)));
            }
    const double pad = cfg.horizon * umax * 1.25;
    const Box3 big{support_box.lo - Vec3{pad, pad, pad}, support_box.hi + Vec3{pad, pad, pad}};
    const Vec3 e = big.extent();
    const int n = lattice_n;
    const double cell = (e.x / n) * (e.y / n) * (e.z / n);
    const std::int64_t total = static_cast<std::int64_t>(n) * n * n;
    auto point = [&](std::int64_t idx) {
        const int iz = static_cast<int>(idx / (n * n));
        const int iy = static_cast<int>((idx / n) % n);
        const int ix = static_cast<int>(idx % n);
        return Vec3{big.lo.x + e.x * (ix + 0.5) / n, big.lo.y + e.y * (iy + 0.5) / n,
                    big.lo.z + e.z * (iz + 0.5) / n};
    };
    const double num = par::sum_index(total, [&](std::int64_t i) {
        return std::pow(streamwise_maximal(f, map, point(i), cfg), p);
    });
    const double den = par::sum_index(total, [&](std::int64_t i) {
        return std::pow(std::abs(f(point(i))), p);
    });
    if (den * cell <= 0.0) throw std::invalid_argument("strong_pp_ratio: zero input norm");
    return std::pow(num / den, 1.0 / p);
}

}  // namespace capflow
