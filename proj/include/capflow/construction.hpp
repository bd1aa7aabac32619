#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "capflow/fields.hpp"
#include "capflow/geometry.hpp"
#include "capflow/maximal.hpp"

namespace capflow {

enum class PointClass { Round, Long };

enum class RootStatus {
    Found,          // bracketed sign change, bisected to tolerance
    UnboundedHigh,  // g < 0 over the whole bracket (capsule pinned at R_hi)
    UnboundedLow,   // g > 0 over the whole bracket (capsule pinned at R_lo)
};

/// Parameters of the per-point capsule search.
struct CapsuleParams {
    enum class Mode { Standard, Alternative };

    double epsilon0 = 0.01;   // in (0, 1)
    double epsilon1 = 1e-4;   // << epsilon0, reported through the calibration
    double delta = 5.0 / 12.0;  // in [0, 5/12]
    double sigma = 5.0 / 12.0;  // >= delta
    Mode mode = Mode::Standard;
    double gamma = 1.0;        // alternative mode, in [0, lambda_exp]
    double lambda_exp = 1.0;   // alternative mode, >= 1
    double r_lo = 1e-3, r_hi = 1e3;
    int scan_points = 200;     // log-grid scan of the bracket
    double root_tol_rel = 1e-6;  // |g(R*)| <= root_tol_rel * epsilon0

    void validate() const;
};

/// Output of the per-point construction.
struct ConstructedCapsule {
    Capsule capsule;
    double speed = 0.0;        // U = |ball average of u|
    Vec3 drift{};              // b = U e
    double xi_tilde = 0.0;     // composite shear scale at R*
    PointClass classification = PointClass::Round;
    RootStatus status = RootStatus::Found;
    double residual = 0.0;     // |g(R*)|
    double implied_epsilon1 = 0.0;  // xi_tilde * L * R * (R/L)^delta

    bool unbounded() const { return status != RootStatus::Found; }
};

/// Ball average of the field: returns (|b|, b/|b|), or (0, e1) when the
/// average vanishes.
std::pair<double, Vec3> average_velocity(const VectorField& field, const Vec3& x, double R,
                                         const QuadratureSpec& q);

/// Half-length rule.  Standard: L = max{U R, 1}^(1/(1+sigma)) R.
/// Alternative: L = max{U R^gamma, 1} R.  Always L >= R, with equality iff
/// the max is attained at 1.
double length_rule(double U, double R, const CapsuleParams& params);

/// Scan the radius bracket on a log grid for the first sign change of
///   g(R) = Xi_R L_R^(1-delta) R^(1+delta) - epsilon0      (standard)
///   g(R) = Xi_R L_R R^lambda_exp - epsilon0               (alternative)
/// and bisect it to |g| <= tol.  If g never changes sign the capsule is
/// pinned at the matching bracket end and marked unbounded.
ConstructedCapsule find_capsule(const VectorField& field, const Vec3& x,
                                const CapsuleParams& params, const MaximalConfig& cfg,
                                const QuadratureSpec& q);

struct ClassifiedPoints {
    std::vector<ConstructedCapsule> capsules;  // index-aligned with inputs
    std::vector<int> round_indices;
    std::vector<int> long_indices;
    std::vector<std::pair<int, std::string>> errors;  // per-point failures
};

/// find_capsule over a batch; parallel across points, order preserved,
/// per-point errors collected rather than fatal.
ClassifiedPoints classify_points(const VectorField& field, const std::vector<Vec3>& points,
                                 const CapsuleParams& params, const MaximalConfig& cfg,
                                 const QuadratureSpec& q);

/// sup over capsule samples of |u(y) - b|, divided by the classification's
/// oscillation scale: epsilon0 (R/L) U for long points, 1/R for round ones.
double oscillation_check(const VectorField& field, const ConstructedCapsule& cc,
                         const CapsuleParams& params, const QuadratureSpec& q);

/// Empirical coherence sweep over constructed long capsules: whenever two
/// long capsules meet and R(z) <= 2 R(x), test whether the dilation K C_x
/// swallows C_z (by boundary-sample containment).  Failures are data, not
/// errors: the sweep reports the smallest sufficient K per pair.
struct CoherencePair {
    int i = 0, j = 0;         // long-point indices with C_j subset-tested in K C_i
    bool contained = false;   // at the supplied K
    double sufficient_k = 0.0;  // smallest dilation containing all samples
};

std::vector<CoherencePair> coherence_sweep(const std::vector<ConstructedCapsule>& capsules,
                                           double K);

/// Deterministic boundary samples of a capsule: 2 axial tips plus 8 perimeter
/// directions on 3 cross sections (26 points).
std::vector<Vec3> capsule_boundary_samples(const Capsule& c);

}  // namespace capflow
