#include "capflow/covering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "capflow/parallel.hpp"

namespace capflow {

CoverSelection vitali_select(const std::vector<Capsule>& family) {
    CoverSelection sel;
    const int n = static_cast<int>(family.size());
    sel.eliminator.assign(family.size(), -1);
    std::vector<char> alive(family.size(), 1);
    int remaining = n;
    while (remaining > 0) {
        // Lowest index among the maximal radii; its radius trivially exceeds
        // half the supremum of the remaining family.
        int pick = -1;
        double rmax = -1.0;
        for (int i = 0; i < n; ++i) {
            if (!alive[static_cast<std::size_t>(i)]) continue;
            if (family[static_cast<std::size_t>(i)].radius > rmax) {
                rmax = family[static_cast<std::size_t>(i)].radius;
                pick = i;
            }
        }
        sel.selected.push_back(pick);
        ++sel.iterations;
        // Eliminate everything the pick meets (itself included); the tests
        // within one sweep are independent and parallelize over the family.
        std::vector<char> hit(family.size(), 0);
        par::for_index(n, [&](std::int64_t i) {
            const std::size_t u = static_cast<std::size_t>(i);
            if (!alive[u]) return;
            if (static_cast<int>(i) == pick || intersects(family[static_cast<std::size_t>(pick)], family[u]))
                hit[u] = 1;
        });
        for (int i = 0; i < n; ++i) {
            const std::size_t u = static_cast<std::size_t>(i);
            if (hit[u]) {
                alive[u] = 0;
                sel.eliminator[u] = pick;
                --remaining;
            }
        }
    }
    // Verify disjointness with the exact predicate.
    sel.pairwise_disjoint = true;
    for (std::size_t a = 0; a < sel.selected.size() && sel.pairwise_disjoint; ++a)
        for (std::size_t b = a + 1; b < sel.selected.size(); ++b) {
            if (intersects(family[static_cast<std::size_t>(sel.selected[a])],
                           family[static_cast<std::size_t>(sel.selected[b])])) {
                sel.pairwise_disjoint = false;
                break;
            }
        }
    return sel;
}

CoverageReport coverage_check(CoverSelection& selection, const std::vector<Capsule>& family,
                              double K) {
    if (!(K >= 1.0)) throw std::invalid_argument("coverage_check: K must be >= 1");
    CoverageReport rep;
    rep.K = K;
    selection.K = K;
    std::vector<Capsule> dilated;
    dilated.reserve(selection.selected.size());
    for (int idx : selection.selected)
        dilated.push_back(dilate(family[static_cast<std::size_t>(idx)], K));
    auto covered_point = [&](const Vec3& y) {
        for (const Capsule& c : dilated)
            if (contains(c, y)) return true;
        return false;
    };
    int centers_covered = 0;
    std::int64_t samples_total = 0, samples_covered = 0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const Capsule& c = family[i];
        bool all = true;
        if (covered_point(c.center)) {
            ++centers_covered;
        } else {
            all = false;
            rep.uncovered_samples.push_back(c.center);
        }
        ++samples_total;
        samples_covered += covered_point(c.center) ? 1 : 0;
        for (const Vec3& y : capsule_boundary_samples(c)) {
            ++samples_total;
            if (covered_point(y)) {
                ++samples_covered;
            } else {
                all = false;
                if (rep.uncovered_samples.size() < 64) rep.uncovered_samples.push_back(y);
            }
        }
        ++rep.checked;
        if (all)
            ++rep.covered;
        else
            rep.uncovered_indices.push_back(static_cast<int>(i));
    }
    rep.center_coverage = family.empty() ? 1.0 : double(centers_covered) / double(family.size());
    rep.sample_coverage = samples_total == 0 ? 1.0 : double(samples_covered) / double(samples_total);
    selection.coverage_verified = rep.uncovered_indices.empty();
    selection.uncovered = rep.uncovered_indices;
    return rep;
}

double union_volume(const std::vector<Capsule>& family, std::int64_t samples, std::uint64_t seed) {
    if (family.empty()) return 0.0;
    Box3 box = family.front().bounding_box();
    for (const Capsule& c : family) {
        const Box3 b = c.bounding_box();
        box.lo = {std::min(box.lo.x, b.lo.x), std::min(box.lo.y, b.lo.y), std::min(box.lo.z, b.lo.z)};
        box.hi = {std::max(box.hi.x, b.hi.x), std::max(box.hi.y, b.hi.y), std::max(box.hi.z, b.hi.z)};
    }
    const double hits = par::sum_index(samples, [&](std::int64_t i) {
        const Vec3 y = rng::in_box(seed, static_cast<std::uint64_t>(i), box);
        for (const Capsule& c : family)
            if (contains(c, y)) return 1.0;
        return 0.0;
    });
    return box.volume() * hits / static_cast<double>(samples);
}

WeakNormEstimate superlevel_weak_norm(const VectorField& field, const CapsuleParams& params,
                                      const MaximalConfig& cfg, const QuadratureSpec& q,
                                      const Box3& box, double p, std::int64_t n_points,
                                      std::uint64_t seed) {
    if (n_points < 1) throw std::invalid_argument("superlevel_weak_norm: need at least one point");
    std::vector<double> xi2(static_cast<std::size_t>(n_points), 0.0);
    std::vector<char> ok(static_cast<std::size_t>(n_points), 1);
    par::for_index_dynamic(n_points, [&](std::int64_t i) {
        const std::size_t u = static_cast<std::size_t>(i);
        const Vec3 x = rng::in_box(seed, static_cast<std::uint64_t>(i), box);
        try {
            const ConstructedCapsule cc = find_capsule(
                field, x, params, cfg, q.with_seed(rng::derive(q.seed, 0xD000 + u)));
            xi2[u] = cc.xi_tilde * cc.xi_tilde;
        } catch (const std::exception&) {
            ok[u] = 0;
        }
    });
    std::vector<double> xi;
    xi.reserve(xi2.size());
    for (std::size_t i = 0; i < xi2.size(); ++i)
        if (ok[i]) xi.push_back(xi2[i]);
    if (xi.empty()) throw std::runtime_error("superlevel_weak_norm: every point failed");
    // Weak norm of Xi (not Xi^2): levels are sqrt of the sampled Xi^2.
    for (double& v : xi) v = std::sqrt(v);
    return weak_norm_from_samples(std::move(xi), p, box.volume());
}

}  // namespace capflow
