#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "capflow/parallel.hpp"
#include "capflow/rng.hpp"
#include "capflow/vec.hpp"

namespace capflow {

/// Quadrature selector shared by all integral operations.
///   - monte_carlo: sample count + seed, membership rejection inside a
///     bounding box (capsules) or exact in-ball sampling (balls).
///   - tensor: per-axis resolution.  Over capsules this is a member-cell
///     midpoint rule; over balls it is a radial x angular Gauss product rule,
///     which is exact for polynomial integrands.
struct QuadratureSpec {
    enum class Mode { MonteCarlo, Tensor };

    Mode mode = Mode::MonteCarlo;
    std::int64_t samples = 100000;
    std::uint64_t seed = 1;
    int resolution = 24;

    static QuadratureSpec monte_carlo(std::int64_t n, std::uint64_t seed) {
        if (n < 1) throw std::invalid_argument("QuadratureSpec: sample count must be >= 1");
        QuadratureSpec q;
        q.mode = Mode::MonteCarlo;
        q.samples = n;
        q.seed = seed;
        return q;
    }
    static QuadratureSpec tensor(int resolution) {
        if (resolution < 2) throw std::invalid_argument("QuadratureSpec: resolution must be >= 2");
        QuadratureSpec q;
        q.mode = Mode::Tensor;
        q.resolution = resolution;
        return q;
    }

    void validate() const {
        if (mode == Mode::MonteCarlo && samples < 1)
            throw std::invalid_argument("QuadratureSpec: sample count must be >= 1");
        if (mode == Mode::Tensor && resolution < 2)
            throw std::invalid_argument("QuadratureSpec: resolution must be >= 2");
    }

    QuadratureSpec with_seed(std::uint64_t s) const {
        QuadratureSpec q = *this;
        q.seed = s;
        return q;
    }
};

namespace quad {

/// Gauss-Legendre nodes/weights on [-1, 1], computed once per order by
/// Newton iteration on the Legendre recurrence.
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static thread_local std::vector<std::pair<std::vector<double>, std::vector<double>>> cache;
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    if (static_cast<int>(cache.size()) < n + 1) cache.resize(n + 1);
    auto& entry = cache[static_cast<std::size_t>(n)];
    if (entry.first.empty()) {
        std::vector<double> x(n), w(n);
        for (int i = 0; i < (n + 1) / 2; ++i) {
            double t = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
            double p0, p1;
            for (int iter = 0; iter < 100; ++iter) {
                p0 = 1.0;
                p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1.0);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            p0 = 1.0;
            p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            x[static_cast<std::size_t>(i)] = -t;
            x[static_cast<std::size_t>(n - 1 - i)] = t;
            double wi = 2.0 / ((1.0 - t * t) * dp * dp);
            w[static_cast<std::size_t>(i)] = wi;
            w[static_cast<std::size_t>(n - 1 - i)] = wi;
        }
        entry = {std::move(x), std::move(w)};
    }
    return entry;
}

/// integral of f over [a, b] with an n-point Gauss rule.
template <class F>
double gauss_interval(F&& f, double a, double b, int n) {
    const auto& [x, w] = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += w[static_cast<std::size_t>(i)] * f(mid + half * x[static_cast<std::size_t>(i)]);
    return s * half;
}

/// Nodes and weights for the ball product rule: Gauss in radius (weight r^2),
/// Gauss in cos(theta), uniform in phi.  Exact for polynomials of total
/// degree < min(2*n_r - 2, n_t, n_p) in the respective directions.
struct BallRule {
    std::vector<Vec3> points;   // unit-ball points
    std::vector<double> weights;  // sum to |B_1| = 4*pi/3
};

inline const BallRule& ball_rule(int resolution) {
    static thread_local std::vector<BallRule> cache;
    if (resolution < 2) throw std::invalid_argument("ball_rule: resolution must be >= 2");
    if (static_cast<int>(cache.size()) < resolution + 1) cache.resize(resolution + 1);
    BallRule& rule = cache[static_cast<std::size_t>(resolution)];
    if (rule.points.empty()) {
        const int nr = resolution, nt = resolution, np = 2 * resolution;
        const auto& [xr, wr] = gauss_legendre(nr);
        const auto& [xt, wt] = gauss_legendre(nt);
        const double dphi = 6.283185307179586476925286766559 / np;
        rule.points.reserve(static_cast<std::size_t>(nr) * nt * np);
        rule.weights.reserve(rule.points.capacity());
        for (int ir = 0; ir < nr; ++ir) {
            double r = 0.5 * (xr[static_cast<std::size_t>(ir)] + 1.0);
            double wrr = 0.5 * wr[static_cast<std::size_t>(ir)] * r * r;
            for (int it = 0; it < nt; ++it) {
                double ct = xt[static_cast<std::size_t>(it)];
                double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
                double w2 = wrr * wt[static_cast<std::size_t>(it)] * dphi;
                for (int ip = 0; ip < np; ++ip) {
                    double phi = dphi * (ip + 0.5);
                    rule.points.push_back({r * st * std::cos(phi), r * st * std::sin(phi), r * ct});
                    rule.weights.push_back(w2);
                }
            }
        }
    }
    return rule;
}

}  // namespace quad

/// integral of f over the ball B_radius(center).
template <class F>
double ball_integral(F&& f, const Vec3& center, double radius, const QuadratureSpec& q) {
    q.validate();
    if (q.mode == QuadratureSpec::Mode::Tensor) {
        const auto& rule = quad::ball_rule(q.resolution);
        const std::int64_t n = static_cast<std::int64_t>(rule.points.size());
        const double r3 = radius * radius * radius;
        return r3 * par::sum_index(n, [&](std::int64_t i) {
            return rule.weights[static_cast<std::size_t>(i)] * f(center + radius * rule.points[static_cast<std::size_t>(i)]);
        });
    }
    const double vol = 4.18879020478639098462 /* 4*pi/3 */ * radius * radius * radius;
    double mean = par::sum_index(q.samples, [&](std::int64_t i) {
        return f(rng::in_ball(q.seed, static_cast<std::uint64_t>(i), center, radius));
    }) / static_cast<double>(q.samples);
    return vol * mean;
}

/// average of f over the ball B_radius(center).
template <class F>
double ball_average(F&& f, const Vec3& center, double radius, const QuadratureSpec& q) {
    const double vol = 4.18879020478639098462 * radius * radius * radius;
    return ball_integral(std::forward<F>(f), center, radius, q) / vol;
}

template <class F>
Vec3 ball_average_vec(F&& f, const Vec3& center, double radius, const QuadratureSpec& q) {
    q.validate();
    if (q.mode == QuadratureSpec::Mode::Tensor) {
        const auto& rule = quad::ball_rule(q.resolution);
        const std::int64_t n = static_cast<std::int64_t>(rule.points.size());
        Vec3 s = par::sum_index_vec3(n, [&](std::int64_t i) {
            return rule.weights[static_cast<std::size_t>(i)] * f(center + radius * rule.points[static_cast<std::size_t>(i)]);
        });
        return s / (4.18879020478639098462);  // unit-ball weights sum to |B_1|
    }
    Vec3 s = par::sum_index_vec3(q.samples, [&](std::int64_t i) {
        return f(rng::in_ball(q.seed, static_cast<std::uint64_t>(i), center, radius));
    });
    return s / static_cast<double>(q.samples);
}

}  // namespace capflow
