#include "capflow/functionals.hpp"

#include <cmath>
#include <stdexcept>

#include "capflow/construction.hpp"

namespace capflow {

double line_integral(const VectorField& field, const Vec3& x0, const Vec3& x1, int panels) {
    if (panels < 2) throw std::invalid_argument("line_integral: need at least 2 panels");
    const Vec3 d = x1 - x0;
    const auto& [nodes, weights] = quad::gauss_legendre(8);
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = static_cast<double>(p) / panels;
        const double b = static_cast<double>(p + 1) / panels;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double t = mid + half * nodes[k];
            total += half * weights[k] * dot(field.value(x0 + t * d), d);
        }
    }
    return total;
}

double line_integral_comparability(const VectorField& field, const Capsule& c, double U,
                                   int panels) {
    if (!(c.half_length > c.radius))
        throw std::invalid_argument("line_integral_comparability: capsule must be long (L > R)");
    if (!(U > 0.0)) throw std::invalid_argument("line_integral_comparability: U must be positive");
    const Vec3 a = c.center - c.half_length * c.axis;
    const Vec3 b = c.center + c.half_length * c.axis;
    return line_integral(field, a, b, panels) / (2.0 * c.half_length * U);
}

double line_integral_comparability(const VectorField& field, const ConstructedCapsule& cc,
                                   int panels) {
    if (cc.classification != PointClass::Long)
        throw std::invalid_argument("line_integral_comparability: requires a long point");
    return line_integral_comparability(field, cc.capsule, cc.speed, panels);
}

namespace {

// Shared sample sweep: positions and psi values drawn once, the mean taken
// from the identical sample set the moments use.
struct BallSamples {
    std::vector<Vec3> points;
    std::vector<double> weights;  // integration weights summing to |B_R|
    std::vector<Vec3> psi;
    Vec3 mean{};
};

BallSamples gather(const VectorField& psi, const Vec3& x0, double R, const QuadratureSpec& q) {
    q.validate();
    BallSamples s;
    if (q.mode == QuadratureSpec::Mode::Tensor) {
        const auto& rule = quad::ball_rule(q.resolution);
        const double r3 = R * R * R;
        s.points.reserve(rule.points.size());
        s.weights.reserve(rule.points.size());
        for (std::size_t i = 0; i < rule.points.size(); ++i) {
            s.points.push_back(x0 + R * rule.points[i]);
            s.weights.push_back(rule.weights[i] * r3);
        }
    } else {
        const double vol = 4.18879020478639098462 * R * R * R;
        const double w = vol / static_cast<double>(q.samples);
        s.points.reserve(static_cast<std::size_t>(q.samples));
        s.weights.assign(static_cast<std::size_t>(q.samples), w);
        for (std::int64_t i = 0; i < q.samples; ++i)
            s.points.push_back(rng::in_ball(q.seed, static_cast<std::uint64_t>(i), x0, R));
    }
    s.psi.resize(s.points.size());
    double wsum = 0.0;
    Vec3 acc{};
    for (std::size_t i = 0; i < s.points.size(); ++i) {
        s.psi[i] = psi.value(s.points[i]);
        acc += s.weights[i] * s.psi[i];
        wsum += s.weights[i];
    }
    s.mean = acc / wsum;
    return s;
}

}  // namespace

double mean_oscillation(const VectorField& psi, const Vec3& x0, double R, double s,
                        const QuadratureSpec& q) {
    if (!(s >= 1.0)) throw std::invalid_argument("mean_oscillation: exponent must be >= 1");
    const BallSamples smp = gather(psi, x0, R, q);
    double num = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < smp.points.size(); ++i) {
        num += smp.weights[i] * std::pow(norm(smp.psi[i] - smp.mean), s);
        wsum += smp.weights[i];
    }
    return std::pow(num / wsum, 1.0 / s);
}

double stream_moment(const VectorField& psi, const Vec3& x, double R, const Vec3& e,
                     const QuadratureSpec& q) {
    const BallSamples smp = gather(psi, x, R, q);
    double total = 0.0;
    for (std::size_t i = 0; i < smp.points.size(); ++i) {
        const Vec3 lever = cross(e, smp.points[i] - x);
        total += smp.weights[i] * dot(smp.psi[i] - smp.mean, lever);
    }
    return total;
}

double stream_moment_by_parts(const VectorField& psi, const Vec3& x, double R,
                              const QuadratureSpec& q) {
    q.validate();
    auto integrand = [&](const Vec3& y) {
        const Vec3 d = y - x;
        return dot(psi.curl(y), d.x * d);
    };
    return ball_integral(integrand, x, R, q);
}

ThresholdResults thresholds(const ExponentInputs& in) {
    if (in.alpha < Rational(0) || in.alpha >= Rational(1))
        throw std::invalid_argument("thresholds: alpha must lie in [0, 1)");
    if (in.beta < Rational(0) || in.beta >= Rational(1))
        throw std::invalid_argument("thresholds: beta must lie in [0, 1)");
    ThresholdResults out;
    out.p_alpha = Rational(4) / (Rational(1) - in.alpha);
    out.p_beta = (Rational(4) - Rational(34) * in.beta / Rational(29)) / (Rational(1) - in.beta);
    return out;
}

double p_alpha(double alpha) {
    if (!(alpha >= 0.0) || alpha >= 1.0) throw std::invalid_argument("p_alpha: alpha must lie in [0, 1)");
    return 4.0 / (1.0 - alpha);
}

double p_beta(double beta) {
    if (!(beta >= 0.0) || beta >= 1.0) throw std::invalid_argument("p_beta: beta must lie in [0, 1)");
    return (4.0 - 34.0 * beta / 29.0) / (1.0 - beta);
}

CompetitorExponents competitor_exponents(double s) {
    if (!(s > 3.0)) throw std::invalid_argument("competitor_exponents: both formulas require s > 3");
    return {(s - 3.0) / (6.0 * (s - 1.0)), std::min(1.0 / 3.0 - 1.0 / s, 1.0 / 6.0)};
}

Rational seregin_alpha(const Rational& s) {
    if (s <= Rational(3)) throw std::invalid_argument("seregin_alpha: requires s > 3");
    return (s - Rational(3)) / (Rational(6) * (s - Rational(1)));
}

Rational chae_wolf_alpha(const Rational& s) {
    if (s <= Rational(3)) throw std::invalid_argument("chae_wolf_alpha: requires s > 3");
    const Rational first = Rational(1, 3) - Rational(1) / s;
    const Rational second(1, 6);
    return first < second ? first : second;
}

Rational seregin_crossover() {
    // (s - 3) / (6 (s - 1)) = t  =>  s = (3 - 6 t) / (1 - 6 t), t = 1/9.
    const Rational t(1, 9);
    return (Rational(3) - Rational(6) * t) / (Rational(1) - Rational(6) * t);
}

Rational chae_wolf_crossover() {
    // 1/3 - 1/s = t  =>  s = 3 / (1 - 3 t), t = 1/9.
    const Rational t(1, 9);
    return Rational(3) / (Rational(1) - Rational(3) * t);
}

}  // namespace capflow
