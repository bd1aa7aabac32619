#include "capflow/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "capflow/parallel.hpp"

namespace capflow {

void CapsuleParams::validate() const {
    if (!(epsilon0 > 0.0 && epsilon0 < 1.0))
        throw std::invalid_argument("CapsuleParams: epsilon0 must lie in (0, 1)");
    if (!(epsilon1 > 0.0)) throw std::invalid_argument("CapsuleParams: epsilon1 must be positive");
    if (!(delta >= 0.0 && delta <= 5.0 / 12.0))
        throw std::invalid_argument("CapsuleParams: delta must lie in [0, 5/12]");
    if (!(sigma >= delta)) throw std::invalid_argument("CapsuleParams: sigma must be >= delta");
    if (mode == Mode::Alternative) {
        if (!(lambda_exp >= 1.0))
            throw std::invalid_argument("CapsuleParams: lambda_exp must be >= 1");
        if (!(gamma >= 0.0 && gamma <= lambda_exp))
            throw std::invalid_argument("CapsuleParams: gamma must lie in [0, lambda_exp]");
    }
    if (!(r_lo > 0.0 && r_hi > r_lo)) throw std::invalid_argument("CapsuleParams: bad radius bracket");
    if (scan_points < 2) throw std::invalid_argument("CapsuleParams: need at least 2 scan points");
    if (!(root_tol_rel > 0.0)) throw std::invalid_argument("CapsuleParams: bad root tolerance");
}

std::pair<double, Vec3> average_velocity(const VectorField& field, const Vec3& x, double R,
                                         const QuadratureSpec& q) {
    if (!(R > 0.0)) throw std::invalid_argument("average_velocity: radius must be positive");
    const Vec3 b = ball_average_vec([&](const Vec3& y) { return field.value(y); }, x, R, q);
    const double U = norm(b);
    if (U == 0.0) return {0.0, kE1};
    return {U, b / U};
}

double length_rule(double U, double R, const CapsuleParams& params) {
    if (!(U >= 0.0) || !(R > 0.0)) throw std::invalid_argument("length_rule: bad inputs");
    if (params.mode == CapsuleParams::Mode::Standard) {
        const double m = std::max(U * R, 1.0);
        return std::pow(m, 1.0 / (1.0 + params.sigma)) * R;
    }
    return std::max(U * std::pow(R, params.gamma), 1.0) * R;
}

namespace {

struct TrialCapsule {
    Capsule capsule;
    double U = 0.0;
    Vec3 e = kE1;
    double xi = 0.0;
    double g = 0.0;
};

/// One evaluation of the search function at radius R.  All sampling is
/// counter-based, so g varies continuously with R and bisection is sound.
TrialCapsule evaluate_radius(const VectorField& field, const Vec3& x, double R,
                             const CapsuleParams& params, const MaximalConfig& cfg,
                             const QuadratureSpec& q) {
    TrialCapsule t;
    auto [U, e] = average_velocity(field, x, R, q.with_seed(rng::derive(q.seed, 0xA5)));
    t.U = U;
    t.e = e;
    const double L = length_rule(U, R, params);
    t.capsule = Capsule(x, R, L, e);

    // Streamwise horizon tied to the capsule scale: 4 L / U, capped by the
    // configured horizon (the U -> 0 limit would be unbounded).
    MaximalConfig local = cfg;
    if (U > 0.0) local.horizon = std::min(4.0 * L / U, cfg.horizon);
    local.s_min = std::min(cfg.s_min, local.horizon);
    t.xi = std::sqrt(std::max(0.0, xi_tilde_squared(field, t.capsule, local,
                                                    q.with_seed(rng::derive(q.seed, 0xC7)))));
    if (params.mode == CapsuleParams::Mode::Standard) {
        t.g = t.xi * std::pow(L, 1.0 - params.delta) * std::pow(R, 1.0 + params.delta) -
              params.epsilon0;
    } else {
        t.g = t.xi * L * std::pow(R, params.lambda_exp) - params.epsilon0;
    }
    if (!std::isfinite(t.g))
        throw NumericError("find_capsule: non-finite search value at R = " + std::to_string(R), R);
    return t;
}

ConstructedCapsule finish(const TrialCapsule& t, const CapsuleParams& params, RootStatus status) {
    ConstructedCapsule out;
    out.capsule = t.capsule;
    out.speed = t.U;
    out.drift = t.U * t.e;
    out.xi_tilde = t.xi;
    out.status = status;
    out.residual = std::abs(t.g);
    const double R = t.capsule.radius, L = t.capsule.half_length;
    out.classification = (L > R) ? PointClass::Long : PointClass::Round;
    out.implied_epsilon1 = t.xi * L * R * std::pow(R / L, params.delta);
    return out;
}

}  // namespace

ConstructedCapsule find_capsule(const VectorField& field, const Vec3& x,
                                const CapsuleParams& params, const MaximalConfig& cfg,
                                const QuadratureSpec& q) {
    params.validate();
    cfg.validate();
    const std::vector<double> grid =
        MaximalConfig::log_grid(params.r_lo, params.r_hi, params.scan_points);
    const double tol = params.root_tol_rel * params.epsilon0;

    TrialCapsule prev = evaluate_radius(field, x, grid[0], params, cfg, q);
    if (std::abs(prev.g) <= tol) return finish(prev, params, RootStatus::Found);
    if (prev.g > 0.0) {
        // Already above the target at the smallest radius: the root (if any)
        // lies below the bracket.
        return finish(prev, params, RootStatus::UnboundedLow);
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        TrialCapsule cur = evaluate_radius(field, x, grid[i], params, cfg, q);
        if (std::abs(cur.g) <= tol) return finish(cur, params, RootStatus::Found);
        if (prev.g < 0.0 && cur.g > 0.0) {
            // First sign-change cell: bisect.
            double lo = grid[i - 1], hi = grid[i];
            TrialCapsule best = cur;
            for (int iter = 0; iter < 200; ++iter) {
                const double mid = 0.5 * (lo + hi);
                TrialCapsule m = evaluate_radius(field, x, mid, params, cfg, q);
                if (std::abs(m.g) < std::abs(best.g)) best = m;
                if (std::abs(m.g) <= tol) return finish(m, params, RootStatus::Found);
                if (m.g < 0.0)
                    lo = mid;
                else
                    hi = mid;
                if (hi - lo <= 1e-15 * hi) break;
            }
            return finish(best, params, RootStatus::Found);
        }
        prev = cur;
    }
    // g stayed negative across the bracket (e.g. Xi identically zero).
    return finish(prev, params, RootStatus::UnboundedHigh);
}

ClassifiedPoints classify_points(const VectorField& field, const std::vector<Vec3>& points,
                                 const CapsuleParams& params, const MaximalConfig& cfg,
                                 const QuadratureSpec& q) {
    ClassifiedPoints out;
    const std::int64_t n = static_cast<std::int64_t>(points.size());
    out.capsules.resize(points.size());
    std::vector<std::string> errs(points.size());
    std::vector<char> failed(points.size(), 0);
    par::for_index_dynamic(n, [&](std::int64_t i) {
        const std::size_t idx = static_cast<std::size_t>(i);
        try {
            // Per-point seed split keeps results independent of batch order.
            out.capsules[idx] = find_capsule(field, points[idx], params, cfg,
                                             q.with_seed(rng::derive(q.seed, 0xB000 + idx)));
        } catch (const std::exception& ex) {
            failed[idx] = 1;
            errs[idx] = ex.what();
        }
    });
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (failed[i]) {
            out.errors.emplace_back(static_cast<int>(i), errs[i]);
            continue;
        }
        // Unbounded markers are degenerate, not genuine long points: they go
        // to the round side so the long set holds constructed capsules only.
        if (out.capsules[i].classification == PointClass::Long && !out.capsules[i].unbounded())
            out.long_indices.push_back(static_cast<int>(i));
        else
            out.round_indices.push_back(static_cast<int>(i));
    }
    return out;
}

double oscillation_check(const VectorField& field, const ConstructedCapsule& cc,
                         const CapsuleParams& params, const QuadratureSpec& q) {
    q.validate();
    const Capsule& c = cc.capsule;
    const Box3 box = c.bounding_box();
    const std::int64_t n = (q.mode == QuadratureSpec::Mode::MonteCarlo)
                               ? q.samples
                               : static_cast<std::int64_t>(q.resolution) * q.resolution * q.resolution;
    const double sup = par::max_index(n, [&](std::int64_t i) {
        Vec3 y;
        if (q.mode == QuadratureSpec::Mode::MonteCarlo) {
            y = rng::in_box(q.seed, static_cast<std::uint64_t>(i), box);
        } else {
            const int m = q.resolution;
            const int iz = static_cast<int>(i / (m * m));
            const int iy = static_cast<int>((i / m) % m);
            const int ix = static_cast<int>(i % m);
            const Vec3 e = box.extent();
            y = {box.lo.x + e.x * (ix + 0.5) / m, box.lo.y + e.y * (iy + 0.5) / m,
                 box.lo.z + e.z * (iz + 0.5) / m};
        }
        if (!contains(c, y)) return 0.0;
        return norm(field.value(y) - cc.drift);
    }, 0.0);
    double scale;
    if (cc.classification == PointClass::Long) {
        scale = params.epsilon0 * (c.radius / c.half_length) * cc.speed;
    } else {
        scale = 1.0 / c.radius;
    }
    if (scale <= 0.0) return sup == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return sup / scale;
}

std::vector<Vec3> capsule_boundary_samples(const Capsule& c) {
    std::vector<Vec3> pts;
    pts.reserve(26);
    // Orthonormal frame around the axis.
    const Vec3 e = c.axis;
    Vec3 u = std::abs(e.x) < 0.9 ? cross(e, kE1) : cross(e, kE2);
    u = normalized(u);
    const Vec3 v = cross(e, u);
    pts.push_back(c.center + c.half_length * e);
    pts.push_back(c.center - c.half_length * e);
    const double h = c.core_half();
    for (int sec = -1; sec <= 1; ++sec) {
        const Vec3 base = c.center + (h * sec) * e;
        for (int k = 0; k < 8; ++k) {
            const double phi = 0.78539816339744830962 * k;  // pi/4 steps
            pts.push_back(base + c.radius * (std::cos(phi) * u + std::sin(phi) * v));
        }
    }
    return pts;
}

std::vector<CoherencePair> coherence_sweep(const std::vector<ConstructedCapsule>& capsules,
                                           double K) {
    std::vector<int> longs;
    for (std::size_t i = 0; i < capsules.size(); ++i)
        if (capsules[i].classification == PointClass::Long && !capsules[i].unbounded())
            longs.push_back(static_cast<int>(i));
    std::vector<CoherencePair> out;
    for (std::size_t a = 0; a < longs.size(); ++a) {
        for (std::size_t b = 0; b < longs.size(); ++b) {
            if (a == b) continue;
            const ConstructedCapsule& cx = capsules[static_cast<std::size_t>(longs[a])];
            const ConstructedCapsule& cz = capsules[static_cast<std::size_t>(longs[b])];
            if (!(cz.capsule.radius <= 2.0 * cx.capsule.radius)) continue;
            if (!intersects(cx.capsule, cz.capsule)) continue;
            CoherencePair pair;
            pair.i = longs[a];
            pair.j = longs[b];
            // Smallest dilation of C_x containing all boundary samples of
            // C_z: each sample y needs lambda with dist(y, lambda-core) <
            // lambda R; scan upward since the core grows with lambda.
            const auto samples = capsule_boundary_samples(cz.capsule);
            double needed = 1.0;
            for (const Vec3& y : samples) {
                double lo = 1.0, hi = 1.0;
                while (!contains(dilate(cx.capsule, hi), y) && hi < 1e6) hi *= 2.0;
                if (hi >= 1e6) {
                    needed = std::max(needed, hi);
                    continue;
                }
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (contains(dilate(cx.capsule, mid), y))
                        hi = mid;
                    else
                        lo = mid;
                }
                needed = std::max(needed, hi);
            }
            pair.sufficient_k = needed;
            pair.contained = needed <= K;
            out.push_back(pair);
        }
    }
    return out;
}

}  // namespace capflow
