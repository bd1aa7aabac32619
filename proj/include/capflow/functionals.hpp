#pragma once

#include "capflow/fields.hpp"
#include "capflow/geometry.hpp"
#include "capflow/quadrature.hpp"
#include "capflow/rational.hpp"
#include "capflow/vec.hpp"

namespace capflow {

struct ConstructedCapsule;  // construction.hpp

/// integral of u . dl along the straight segment x0 -> x1, composite
/// Gauss-Legendre with 8 points per panel.
double line_integral(const VectorField& field, const Vec3& x0, const Vec3& x1, int panels = 16);

/// Ratio of the axis line integral of a long capsule to 2 L U.  Inside the
/// regime ||u - b||_inf <= U/2 on the capsule the ratio lies in [1/2, 3/2].
double line_integral_comparability(const VectorField& field, const ConstructedCapsule& cc,
                                   int panels = 16);

/// Same ratio for a synthetic long capsule with prescribed axis data.
double line_integral_comparability(const VectorField& field, const Capsule& c, double U,
                                   int panels = 16);

/// (avg over B_R(x0) of |psi - mean|^s)^(1/s), the mean taken with the same
/// quadrature samples.
double mean_oscillation(const VectorField& psi, const Vec3& x0, double R, double s,
                        const QuadratureSpec& q);

/// integral over B_R(x) of (psi(y) - mean) . (e x (y - x)) dy.
double stream_moment(const VectorField& psi, const Vec3& x, double R, const Vec3& e,
                     const QuadratureSpec& q);

/// integral over B_R(x) of (curl psi)(y) . ((y-x)_1 (y-x)) dy -- the
/// integration-by-parts counterpart of stream_moment (the boundary term
/// vanishes because y - x is parallel to the outward normal).
double stream_moment_by_parts(const VectorField& psi, const Vec3& x, double R,
                              const QuadratureSpec& q);

// -- exponent-threshold arithmetic ---------------------------------------

struct ExponentInputs {
    Rational alpha{0};      // in [0, 1)
    Rational beta{0};       // in [0, 1)
    double s = 1.0;         // >= 1
    Rational delta{5, 12};
    Rational sigma{5, 12};
};

struct ThresholdResults {
    Rational p_alpha;            // 4 / (1 - alpha)
    Rational p_beta;             // (4 - 34 beta / 29) / (1 - beta)
    Rational alpha_crit{1, 9};
    Rational beta_crit{29, 193};
};

ThresholdResults thresholds(const ExponentInputs& in);
double p_alpha(double alpha);
double p_beta(double beta);

struct CompetitorExponents {
    double seregin;    // (s - 3) / (6 (s - 1))
    double chae_wolf;  // min{1/3 - 1/s, 1/6}
};

/// Both competitor exponents; requires s > 3.
CompetitorExponents competitor_exponents(double s);
Rational seregin_alpha(const Rational& s);
Rational chae_wolf_alpha(const Rational& s);

/// Exact crossover points with the uniform threshold 1/9: the value of s
/// solving (s-3)/(6(s-1)) = 1/9, and the value solving 1/3 - 1/s = 1/9.
Rational seregin_crossover();
Rational chae_wolf_crossover();

}  // namespace capflow
