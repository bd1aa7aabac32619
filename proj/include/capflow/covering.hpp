#pragma once

#include <cstdint>
#include <vector>

#include "capflow/construction.hpp"
#include "capflow/geometry.hpp"
#include "capflow/maximal.hpp"

namespace capflow {

/// Greedy selection certificate.
struct CoverSelection {
    std::vector<int> selected;         // indices into the input family
    double K = 1.0;                    // dilation used by coverage_check
    bool pairwise_disjoint = false;    // exact predicate, verified post hoc
    bool coverage_verified = false;    // filled by coverage_check
    std::vector<int> eliminator;       // input i was removed by selected capsule eliminator[i]
    std::vector<int> uncovered;        // inputs with uncovered samples (coverage_check)
    int iterations = 0;
};

/// Greedy Vitali-type selection: repeatedly pick the lowest index among the
/// capsules of maximal radius (so its radius exceeds half the current
/// supremum), then eliminate everything it meets.  Terminates in at most
/// family-size iterations; the selected set is pairwise disjoint under the
/// exact intersects predicate.
CoverSelection vitali_select(const std::vector<Capsule>& family);

/// For each input capsule, test its center and 26 boundary samples against
/// the union of K-dilated selected capsules.  Full containment is only
/// guaranteed for coherent long-point families; for arbitrary geometry this
/// is an empirical report.
struct CoverageReport {
    double K = 1.0;
    int checked = 0;
    int covered = 0;
    double center_coverage = 0.0;   // fraction of capsule centers covered
    double sample_coverage = 0.0;   // fraction of all samples covered
    std::vector<int> uncovered_indices;
    std::vector<Vec3> uncovered_samples;
};

CoverageReport coverage_check(CoverSelection& selection, const std::vector<Capsule>& family,
                              double K);

/// Monte Carlo volume of the union of a capsule family (samples the joint
/// bounding box).
double union_volume(const std::vector<Capsule>& family, std::int64_t samples = 200000,
                    std::uint64_t seed = 31);

/// Superlevel statistics of the composite shear scale: construct a capsule
/// at each box sample, estimate |{ Xi^2 > alpha }| and the weak-Lp norm of
/// Xi from the sampled values.
WeakNormEstimate superlevel_weak_norm(const VectorField& field, const CapsuleParams& params,
                                      const MaximalConfig& cfg, const QuadratureSpec& q,
                                      const Box3& box, double p, std::int64_t n_points,
                                      std::uint64_t seed = 47);

}  // namespace capflow
