#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "capflow/construction.hpp"
#include "capflow/fields.hpp"
#include "capflow/maximal.hpp"
#include "capflow/quadrature.hpp"
#include "capflow/report.hpp"

namespace capflow {

/// Minimal TOML-style config text: [section] headers and key = value lines,
/// where a value is a number, a bool, a quoted string, or an array of
/// numbers.  Unknown keys are rejected at RunConfig assembly.
struct ConfigFile {
    using Value = std::variant<double, bool, std::string, std::vector<double>>;
    std::map<std::string, std::map<std::string, Value>> sections;

    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    double number(const std::string& section, const std::string& key, double dflt) const;
    std::string str(const std::string& section, const std::string& key,
                    const std::string& dflt) const;
    std::vector<double> array(const std::string& section, const std::string& key,
                              const std::vector<double>& dflt) const;
};

/// Full run description; config-file keys mirror these fields one to one.
struct RunConfig {
    // [field]
    std::string field_preset = "gaussian_curl";  // or empty + grid file
    std::string field_file;                      // VF3D path
    std::map<std::string, double> field_params;

    // [capsule]
    CapsuleParams capsule;

    // [maximal]
    MaximalConfig maximal;

    // [quadrature]
    QuadratureSpec quadrature = QuadratureSpec::monte_carlo(100000, 1);

    // [points]
    std::string points_csv;          // "x,y,z" header
    int lattice_n = 0;               // or lattice over the box below
    Box3 lattice_box{{-1, -1, -1}, {1, 1, 1}};

    // [cover]
    double cover_k = 10.0;

    // [verify]
    double kernel_residual_bound = 1e-8;

    // top level
    std::uint64_t seed = 1;
    std::string out_dir = ".";

    static RunConfig from_file(const std::string& path);
    static RunConfig from_config(const ConfigFile& cf);

    VectorField make_field() const;
    std::vector<Vec3> load_points() const;
    ordered_json echo() const;
};

/// CSV point list with header "x,y,z".
std::vector<Vec3> read_points_csv(const std::string& path);
void write_points_csv(const std::string& path, const std::vector<Vec3>& points);

}  // namespace capflow
