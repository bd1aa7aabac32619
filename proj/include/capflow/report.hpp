#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace capflow {

using ordered_json = nlohmann::ordered_json;

/// Stable identifiers for every check the suites can emit.  Each report
/// record must carry one of these; the registry closure is itself asserted
/// by the verify pipeline so no orphan checks appear.
namespace anchors {

inline const std::set<std::string>& registry() {
    static const std::set<std::string> reg = {
        "capsule-membership",
        "capsule-dilation",
        "capsule-volume",
        "capsule-volume-comparability",
        "chord-length",
        "sandwich-inequality",
        "capsule-intersection",
        "capsule-quadrature",
        "mean-velocity-oscillation",
        "classical-maximal",
        "streamwise-maximal",
        "maximal-domination",
        "strong-pp-bound",
        "dirichlet-by-maximal",
        "streamline-proximity",
        "weak-norm-estimator",
        "superlevel-weak-norm",
        "capsule-construction",
        "length-rule",
        "round-long-classification",
        "construction-residual",
        "oscillation-bound",
        "capsule-coherence",
        "vitali-selection",
        "vitali-coverage",
        "covering-measure",
        "line-integral",
        "line-integral-comparability",
        "mean-oscillation-hypothesis",
        "stream-moment-identity",
        "stream-moment-constant",
        "control-mean-oscillation",
        "threshold-arithmetic",
        "competitor-exponents",
        "drift-kernel-bound",
        "drift-kernel-gradient",
        "drift-kernel-residual",
        "delta-normalization",
        "mixed-norm-bound",
        "kernel-capsule-norm",
        "biot-savart-inversion",
        "biot-savart-decay",
        "local-estimate",
        "flow-map",
        "field-divergence",
        "report-registry",
        "run-determinism",
    };
    return reg;
}

}  // namespace anchors

/// One verification record.  Status "recorded" marks empirical constants
/// that have no reference value and are archived rather than gated.
struct CheckRecord {
    std::string name;
    std::string anchor;
    ordered_json values;  // computed quantities
    std::string bound;    // human-readable bound / tolerance
    std::string status;   // "pass" | "fail" | "recorded"
    std::string note;

    static CheckRecord pass_fail(std::string name, std::string anchor, bool ok,
                                 ordered_json values, std::string bound, std::string note = "");
    static CheckRecord recorded(std::string name, std::string anchor, ordered_json values,
                                std::string bound = "", std::string note = "");
};

struct Report {
    std::string title;
    std::vector<CheckRecord> records;
    ordered_json config_echo;
    ordered_json environment;  // threads, compiler, sizes
    std::string timestamp;     // excluded from determinism comparisons

    void add(CheckRecord r);
    int failed() const;
    int passed() const;
    int recorded_count() const;

    /// All anchors present in the registry?  Appends the closure record.
    bool validate_anchors();

    ordered_json to_json() const;
    void write_json(const std::string& path) const;
    /// Flat CSV: name, anchor, status, bound, note.
    void write_csv(const std::string& path) const;

    /// Exit-code convention: number of failed checks, capped at 100.
    int exit_code() const { return std::min(failed(), 100); }
};

ordered_json environment_stamp();
std::string now_iso8601();

}  // namespace capflow
