#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "capflow/fields.hpp"
#include "capflow/geometry.hpp"
#include "capflow/quadrature.hpp"
#include "capflow/scalars.hpp"

namespace capflow {

/// Discretization of the two suprema: radii on a log grid, streamwise
/// windows on a log grid up to the horizon.  Any finite grid underestimates
/// the true supremum, so all domination statements carry one-sided slack.
struct MaximalConfig {
    double r_min = 1e-3, r_max = 1e2;
    int n_r = 60;
    double horizon = 1.0;  // T
    double s_min = 1e-3;
    int n_s = 60;
    QuadratureSpec ball_quad = QuadratureSpec::monte_carlo(512, 2025);
    double flow_step = 1e-2;  // step for flow maps built internally

    void validate() const {
        if (!(r_min > 0.0) || !(r_max > r_min) || n_r < 1)
            throw std::invalid_argument("MaximalConfig: bad radius grid");
        if (!(s_min > 0.0) || !(horizon > 0.0) || n_s < 1)
            throw std::invalid_argument("MaximalConfig: bad window grid");
        if (!(flow_step > 0.0)) throw std::invalid_argument("MaximalConfig: bad flow step");
    }

    std::vector<double> radius_grid() const { return log_grid(r_min, r_max, n_r); }
    std::vector<double> window_grid() const { return log_grid(std::min(s_min, horizon), horizon, n_s); }

    static std::vector<double> log_grid(double lo, double hi, int n) {
        std::vector<double> g(static_cast<std::size_t>(n));
        if (n == 1) {
            g[0] = hi;
            return g;
        }
        const double ratio = std::log(hi / lo) / (n - 1);
        for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
        g.back() = hi;
        return g;
    }
};

/// Classical maximal function: max over the radius grid of the ball average
/// of |f|.  Each radius reuses the same sampling stream so that f <= g
/// pointwise implies Mf <= Mg on the computed values.
template <class F>
double classical_maximal(F&& f, const Vec3& x, const MaximalConfig& cfg) {
    cfg.validate();
    double best = 0.0;
    const auto radii = cfg.radius_grid();
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const QuadratureSpec q = cfg.ball_quad.with_seed(rng::derive(cfg.ball_quad.seed, k));
        const double avg = ball_average([&](const Vec3& y) { return std::abs(f(y)); }, x, radii[k], q);
        best = std::max(best, avg);
    }
    return best;
}

/// Streamwise maximal function: max over the window grid of the centered
/// trajectory average of |f|, trapezoid rule on flow steps.
template <class F>
double streamwise_maximal(F&& f, const FlowMap& map, const Vec3& x, const MaximalConfig& cfg) {
    cfg.validate();
    const int m = std::max(1, static_cast<int>(std::ceil(cfg.horizon / map.step())));
    const double h = cfg.horizon / m;
    const std::vector<Vec3> fwd = map.trajectory(x, h, m);
    const std::vector<Vec3> bwd = map.trajectory(x, -h, m);
    std::vector<double> vf(fwd.size()), vb(bwd.size());
    for (std::size_t j = 0; j < fwd.size(); ++j) vf[j] = std::abs(f(fwd[j]));
    for (std::size_t j = 0; j < bwd.size(); ++j) vb[j] = std::abs(f(bwd[j]));
    // Cumulative trapezoid integrals over [0, j*h] on each side.
    std::vector<double> cf(fwd.size(), 0.0), cb(bwd.size(), 0.0);
    for (std::size_t j = 1; j < fwd.size(); ++j) cf[j] = cf[j - 1] + 0.5 * h * (vf[j - 1] + vf[j]);
    for (std::size_t j = 1; j < bwd.size(); ++j) cb[j] = cb[j - 1] + 0.5 * h * (vb[j - 1] + vb[j]);
    double best = 0.0;
    for (double s : cfg.window_grid()) {
        const int k = std::clamp(static_cast<int>(std::llround(s / h)), 1, m);
        const double integral = cf[static_cast<std::size_t>(k)] + cb[static_cast<std::size_t>(k)];
        best = std::max(best, integral / (2.0 * k * h));
    }
    return best;
}

/// The composed quantity M_Phi[M(|grad u|^2)] at a point, with the flow map
/// of the same field.
double composed_maximal(const VectorField& field, const FlowMap& map, const Vec3& x,
                        const MaximalConfig& cfg);

/// Capsule average of the composed maximal quantity (the square of the
/// capsule's composite shear scale).
double xi_tilde_squared(const VectorField& field, const Capsule& c, const MaximalConfig& cfg,
                        const QuadratureSpec& q);

/// Threshold grid for level-set measures.
struct ThresholdSpec {
    std::vector<double> levels;  // ascending

    static ThresholdSpec explicit_levels(std::vector<double> v) {
        ThresholdSpec t;
        t.levels = std::move(v);
        std::sort(t.levels.begin(), t.levels.end());
        return t;
    }
    static ThresholdSpec log_spaced(double lo, double hi, int n) {
        ThresholdSpec t;
        t.levels = MaximalConfig::log_grid(lo, hi, n);
        return t;
    }
    static ThresholdSpec linear(double lo, double hi, int n) {
        ThresholdSpec t;
        for (int i = 0; i < n; ++i)
            t.levels.push_back(lo + (hi - lo) * (n == 1 ? 0.0 : double(i) / (n - 1)));
        return t;
    }
};

/// Level-set measures |{x in box : f(x) > alpha}| per threshold and the
/// resulting weak-Lp quasi-norm estimate sup_alpha alpha |S_alpha|^{1/p}.
struct WeakNormEstimate {
    double p = 2.0;
    std::vector<double> thresholds;
    std::vector<double> measures;  // nonincreasing in alpha
    double value = 0.0;
};

WeakNormEstimate weak_norm(const ScalarFn& f, double p, const Box3& box, const ThresholdSpec& grid,
                           const QuadratureSpec& q = QuadratureSpec::monte_carlo(200000, 11));

/// Weak-norm estimate built from an explicit sample set (value v_i at
/// uniform box samples).  The supremum is taken over the sampled order
/// statistics, so levels land just below the observed values.
WeakNormEstimate weak_norm_from_samples(std::vector<double> values, double p, double box_volume,
                                        int n_thresholds = 32);

/// |Phi_{(t1-t0)/U}(B_R(t0 e1)) cap B_R(t1 e1)| / |B_R| by advecting n
/// uniform ball samples.  U > 0 is required (the advection time divides by
/// it); trajectories leaving a gridded domain raise DomainError whose
/// exit_time() field carries the exited fraction.
double streamline_proximity(const FlowMap& map, double R, double t0, double t1, double U,
                            std::int64_t n, std::uint64_t seed = 99);

/// Ratio of the dilated-capsule Dirichlet average to the capsule average of
/// the composed maximal quantity.
struct DirichletComparison {
    double numerator = 0.0;    // avg over 2C of |grad u|^2
    double denominator = 0.0;  // avg over C of M_Phi[M(|grad u|^2)]
    double ratio = 0.0;
    bool degenerate = false;   // both sides vanish (constant fields)
};

DirichletComparison dirichlet_comparison(const VectorField& field, const Capsule& c,
                                         const MaximalConfig& cfg);

/// Empirical strong-(p,p) constant ||M_Phi f||_p / ||f||_p, norms by a
/// midpoint lattice over `box` grown by the horizon travel distance.
double strong_pp_ratio(const ScalarFn& f, const FlowMap& map, const Box3& support_box, double p,
                       const MaximalConfig& cfg, int lattice_n = 12);

}  // namespace capflow
