#pragma once

#include <functional>
#include <vector>

#include "capflow/fields.hpp"
#include "capflow/geometry.hpp"
#include "capflow/quadrature.hpp"
#include "capflow/vec.hpp"

namespace capflow {

/// Fundamental solution data for the constant-drift Poisson operator
/// b . grad - nu Lap with b = U e1:
///   Gamma(x) = e^{-lambda (r - x1)} / (4 pi nu r),  lambda = U / (2 nu).
struct OseenKernel {
    double nu = 1.0;
    double U = 0.0;

    OseenKernel() = default;
    OseenKernel(double viscosity, double drift);

    double lambda() const { return U / (2.0 * nu); }
};

/// r - x1 evaluated as (x2^2 + x3^2) / (r + x1) when x1 > 0, which avoids
/// the cancellation near the positive axis.
double stable_r_minus_x1(const Vec3& x, double r);

double gamma(const OseenKernel& k, const Vec3& x);
Vec3 grad_gamma(const OseenKernel& k, const Vec3& x);

/// grad(log Gamma) = -(1/r + lambda) x/r + lambda e1 (used by the residual).
Vec3 grad_log_gamma(const OseenKernel& k, const Vec3& x);

/// b . grad Gamma - nu Lap Gamma from the closed-form pieces, together with
/// the magnitude scale of the terms entering the computation.  `relative`
/// is |residual| / scale; at U = 0 both terms of the operator vanish
/// analytically, so the scale is the only meaningful yardstick.
struct PdeResidual {
    double residual = 0.0;
    double scale = 0.0;
    double relative = 0.0;
};

PdeResidual pde_residual(const OseenKernel& k, const Vec3& x);

/// integral over the sphere of radius r of nu Gamma / r, by Gauss quadrature
/// in the polar cosine; tends to 1 as r -> 0.
double delta_normalization(const OseenKernel& k, double r, int quad_points = 96);

/// Radial profile integral of the gradient bound:
///   J(x1) = int_0^inf r^{-9/4} (r - x1)^{-3/4} rho drho,   r^2 = rho^2 + x1^2.
/// Computed by substituted Gauss quadrature; satisfies J <= 4/|x1| with
/// equality for x1 > 0 (the planar integral carries an extra angular factor
/// of 2 pi on top of this profile).  x1 = 0 diverges.
double mixed_norm_bound(double x1, int quad_points = 96);

/// integral of |x|^{-3/2} over the capsule of radius 3R, half-length 3L
/// centered at the origin (the inner radial integral is analytic, the axial
/// one is Gauss quadrature after a cusp-removing substitution).  Scales like
/// R^{3/2} uniformly in L.
double capsule_kernel_norm(double R, double L, int quad_points = 96);

/// Smooth bump equal to 1 on the capsule and 0 outside its 2-dilation.
double capsule_cutoff(const Capsule& c, const Vec3& y);

/// Scale coordinate: the smallest s with y inside the closure of s C.
double capsule_scale(const Capsule& c, const Vec3& y);

/// Velocity reconstruction v = (1/4pi) int (phi omega)(y) x (x - y)/|x-y|^3 dy
/// with the cutoff built over `support`.  Sources are precomputed on a
/// tensor grid over the 2-dilated support; the cell containing the target is
/// skipped (the kernel integrates to zero over a centered ball, so the
/// omitted cell contributes at higher order).
class BiotSavartOperator {
  public:
    BiotSavartOperator(const VectorField& omega, const Capsule& support, const QuadratureSpec& q);

    Vec3 operator()(const Vec3& x) const;

    double cell_size() const { return cell_size_; }
    /// Coarse-resolution heuristic: the cell diagonal is not small against
    /// the support radius.
    bool resolution_warning() const;

  private:
    Capsule support_;
    Box3 box_;
    int n_ = 0;
    Vec3 h_{};
    double cell_size_ = 0.0;
    std::vector<Vec3> moments_;  // (phi omega)(y_cell) * cell volume
    std::vector<Vec3> centers_;
};

/// Single-point convenience form of the operator above.
Vec3 biot_savart(const VectorField& omega, const Capsule& support, const Vec3& x,
                 const QuadratureSpec& q);

/// Manufactured scalar with analytic derivatives for the local estimate.
struct ManufacturedScalar {
    std::function<double(const Vec3&)> value;
    std::function<Vec3(const Vec3&)> gradient;
    std::function<double(const Vec3&)> laplacian;

    static ManufacturedScalar constant(double c);
    static ManufacturedScalar gaussian(const Vec3& center, double width, double amplitude = 1.0);
};

struct LocalEstimateReport {
    double q = 1.5;
    double r = 3.0;              // 1/r = 1/q - 1/3
    double lhs = 0.0;            // ||theta||_{L^r(C/2)}
    double f_term = 0.0;         // R ||f||_{L^q(C)}
    double g_term = 0.0;         // ||g||_{L^q(C)}
    double theta_term = 0.0;     // (U R / L + 1/R) ||theta||_{L^q(C)}
    double rhs = 0.0;
    double ratio = 0.0;          // lhs / rhs (empirical constant)
};

/// Manufactured-solution check of the interior estimate, forcing through f:
/// f = b . grad theta - nu Lap theta, g = 0.
LocalEstimateReport local_estimate_check(const OseenKernel& k, const Capsule& c,
                                         const ManufacturedScalar& theta, double q_exp,
                                         const QuadratureSpec& quad);

/// Same check with the forcing routed through the divergence term:
/// g = b theta - nu grad theta (so div g equals the manufactured forcing)
/// and f = 0.
LocalEstimateReport local_estimate_check_divergence(const OseenKernel& k, const Capsule& c,
                                                    const ManufacturedScalar& theta, double q_exp,
                                                    const QuadratureSpec& quad);

}  // namespace capflow
