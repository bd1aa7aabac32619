#pragma once

#include <string>

#include "capflow/config.hpp"
#include "capflow/report.hpp"

namespace capflow {

/// Full property suite: geometry sandwich, chord identity, maximal
/// domination and oracles, kernel residual/normalization/mixed-norm sweeps,
/// threshold arithmetic, stream moments, weak norms, proximity and
/// comparability trials.  Writes report.json / report.csv into out_dir.
Report run_verify(const RunConfig& config);

/// Batch capsule construction over the configured point source.  Writes
/// capsules.json plus a construction report.
Report run_construct(const RunConfig& config);

/// Vitali selection and coverage certification over a capsule family file
/// (JSON array of records carrying center/R/L/e).  Writes cover_report.json.
Report run_cover(const RunConfig& config, const std::string& capsules_file);

/// Shared helpers (also exercised by the test suites).
std::vector<Capsule> read_capsule_family(const std::string& path);
void write_capsule_family(const std::string& path, const std::vector<Capsule>& family);

/// Measure of { t in (-l, l) : |x - t e1| < R } by scan-and-bisection on the
/// smooth distance function; the independent numerical route for the chord
/// formula.
double chord_by_scan(double R, double l, const Vec3& x, int scan_cells = 512);

}  // namespace capflow
