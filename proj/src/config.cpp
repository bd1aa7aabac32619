#include "capflow/config.hpp"

#include <fstream>
#include <sstream>

namespace capflow {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

ConfigFile::Value parse_value(const std::string& raw, int line_no) {
    const std::string v = trim(raw);
    if (v.empty()) throw std::runtime_error("config: empty value at line " + std::to_string(line_no));
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw std::runtime_error("config: unterminated string at line " + std::to_string(line_no));
        return v.substr(1, v.size() - 2);
    }
    if (v.front() == '[') {
        if (v.back() != ']')
            throw std::runtime_error("config: unterminated array at line " + std::to_string(line_no));
        std::vector<double> arr;
        std::stringstream ss(v.substr(1, v.size() - 2));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const std::string t = trim(item);
            if (t.empty()) continue;
            arr.push_back(std::stod(t));
        }
        return arr;
    }
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::runtime_error("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config: cannot parse value '" + v + "' at line " +
                                 std::to_string(line_no));
    }
}

}  // namespace

ConfigFile ConfigFile::parse_text(const std::string& text) {
    ConfigFile cf;
    std::stringstream ss(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config: bad section header at line " + std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: expected key = value at line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        cf.sections[section][key] = parse_value(line.substr(eq + 1), line_no);
    }
    return cf;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
}

double ConfigFile::number(const std::string& section, const std::string& key, double dflt) const {
    if (!has(section, key)) return dflt;
    const Value& v = sections.at(section).at(key);
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw std::runtime_error("config: [" + section + "] " + key + " must be a number");
}

std::string ConfigFile::str(const std::string& section, const std::string& key,
                            const std::string& dflt) const {
    if (!has(section, key)) return dflt;
    const Value& v = sections.at(section).at(key);
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    throw std::runtime_error("config: [" + section + "] " + key + " must be a string");
}

std::vector<double> ConfigFile::array(const std::string& section, const std::string& key,
                                      const std::vector<double>& dflt) const {
    if (!has(section, key)) return dflt;
    const Value& v = sections.at(section).at(key);
    if (const auto* a = std::get_if<std::vector<double>>(&v)) return *a;
    throw std::runtime_error("config: [" + section + "] " + key + " must be an array");
}

RunConfig RunConfig::from_file(const std::string& path) {
    return from_config(ConfigFile::parse_file(path));
}

RunConfig RunConfig::from_config(const ConfigFile& cf) {
    RunConfig rc;
    rc.seed = static_cast<std::uint64_t>(cf.number("", "seed", 1.0));
    rc.out_dir = cf.str("", "out", ".");

    rc.field_preset = cf.str("field", "preset", "gaussian_curl");
    rc.field_file = cf.str("field", "file", "");
    if (auto s = cf.sections.find("field"); s != cf.sections.end()) {
        for (const auto& [key, value] : s->second) {
            if (key == "preset" || key == "file") continue;
            if (const double* d = std::get_if<double>(&value)) rc.field_params[key] = *d;
        }
    }

    rc.capsule.epsilon0 = cf.number("capsule", "epsilon0", rc.capsule.epsilon0);
    rc.capsule.epsilon1 = cf.number("capsule", "epsilon1", rc.capsule.epsilon1);
    rc.capsule.delta = cf.number("capsule", "delta", rc.capsule.delta);
    rc.capsule.sigma = cf.number("capsule", "sigma", rc.capsule.sigma);
    rc.capsule.mode = cf.str("capsule", "mode", "standard") == "alternative"
                          ? CapsuleParams::Mode::Alternative
                          : CapsuleParams::Mode::Standard;
    rc.capsule.gamma = cf.number("capsule", "gamma", rc.capsule.gamma);
    rc.capsule.lambda_exp = cf.number("capsule", "lambda_exp", rc.capsule.lambda_exp);
    rc.capsule.r_lo = cf.number("capsule", "r_lo", rc.capsule.r_lo);
    rc.capsule.r_hi = cf.number("capsule", "r_hi", rc.capsule.r_hi);
    rc.capsule.scan_points = static_cast<int>(cf.number("capsule", "scan_points", rc.capsule.scan_points));
    rc.capsule.root_tol_rel = cf.number("capsule", "root_tol", rc.capsule.root_tol_rel);

    rc.maximal.r_min = cf.number("maximal", "r_min", rc.maximal.r_min);
    rc.maximal.r_max = cf.number("maximal", "r_max", rc.maximal.r_max);
    rc.maximal.n_r = static_cast<int>(cf.number("maximal", "n_r", rc.maximal.n_r));
    rc.maximal.horizon = cf.number("maximal", "horizon", rc.maximal.horizon);
    rc.maximal.s_min = cf.number("maximal", "s_min", rc.maximal.s_min);
    rc.maximal.n_s = static_cast<int>(cf.number("maximal", "n_s", rc.maximal.n_s));
    rc.maximal.flow_step = cf.number("maximal", "flow_step", rc.maximal.flow_step);
    const std::int64_t ball_samples =
        static_cast<std::int64_t>(cf.number("maximal", "ball_samples", 512));
    rc.maximal.ball_quad = QuadratureSpec::monte_carlo(ball_samples, rc.seed ^ 0x5EEDULL);

    const std::string qmode = cf.str("quadrature", "mode", "mc");
    if (qmode == "tensor") {
        rc.quadrature = QuadratureSpec::tensor(static_cast<int>(cf.number("quadrature", "resolution", 24)));
    } else {
        rc.quadrature = QuadratureSpec::monte_carlo(
            static_cast<std::int64_t>(cf.number("quadrature", "samples", 100000)), rc.seed);
    }

    rc.points_csv = cf.str("points", "csv", "");
    rc.lattice_n = static_cast<int>(cf.number("points", "lattice_n", 0));
    const auto lo = cf.array("points", "lo", {-1, -1, -1});
    const auto hi = cf.array("points", "hi", {1, 1, 1});
    if (lo.size() == 3 && hi.size() == 3) {
        rc.lattice_box = {{lo[0], lo[1], lo[2]}, {hi[0], hi[1], hi[2]}};
    }

    rc.cover_k = cf.number("cover", "K", rc.cover_k);
    rc.kernel_residual_bound = cf.number("verify", "kernel_residual_bound", rc.kernel_residual_bound);
    return rc;
}

VectorField RunConfig::make_field() const {
    if (!field_file.empty()) return VectorField::from_grid(load_vf3d(field_file));
    return VectorField::make(field_preset, field_params);
}

std::vector<Vec3> RunConfig::load_points() const {
    if (!points_csv.empty()) return read_points_csv(points_csv);
    if (lattice_n > 0) {
        std::vector<Vec3> pts;
        const int n = lattice_n;
        const Vec3 e = lattice_box.extent();
        pts.reserve(static_cast<std::size_t>(n) * n * n);
        for (int iz = 0; iz < n; ++iz)
            for (int iy = 0; iy < n; ++iy)
                for (int ix = 0; ix < n; ++ix)
                    pts.push_back({lattice_box.lo.x + e.x * (ix + 0.5) / n,
                                   lattice_box.lo.y + e.y * (iy + 0.5) / n,
                                   lattice_box.lo.z + e.z * (iz + 0.5) / n});
        return pts;
    }
    throw std::runtime_error("RunConfig: no point source (set [points] csv or lattice_n)");
}

ordered_json RunConfig::echo() const {
    ordered_json j;
    j["seed"] = seed;
    j["out"] = out_dir;
    j["field"] = {{"preset", field_preset}, {"file", field_file}};
    for (const auto& [k, v] : field_params) j["field"][k] = v;
    j["capsule"] = {{"epsilon0", capsule.epsilon0},
                    {"epsilon1", capsule.epsilon1},
                    {"delta", capsule.delta},
                    {"sigma", capsule.sigma},
                    {"mode", capsule.mode == CapsuleParams::Mode::Standard ? "standard" : "alternative"},
                    {"gamma", capsule.gamma},
                    {"lambda_exp", capsule.lambda_exp},
                    {"r_lo", capsule.r_lo},
                    {"r_hi", capsule.r_hi},
                    {"scan_points", capsule.scan_points},
                    {"root_tol", capsule.root_tol_rel}};
    j["maximal"] = {{"r_min", maximal.r_min}, {"r_max", maximal.r_max}, {"n_r", maximal.n_r},
                    {"horizon", maximal.horizon}, {"s_min", maximal.s_min}, {"n_s", maximal.n_s},
                    {"flow_step", maximal.flow_step}, {"ball_samples", maximal.ball_quad.samples}};
    j["quadrature"] = {{"mode", quadrature.mode == QuadratureSpec::Mode::MonteCarlo ? "mc" : "tensor"},
                       {"samples", quadrature.samples},
                       {"resolution", quadrature.resolution}};
    j["points"] = {{"csv", points_csv}, {"lattice_n", lattice_n}};
    j["cover"] = {{"K", cover_k}};
    j["verify"] = {{"kernel_residual_bound", kernel_residual_bound}};
    return j;
}

std::vector<Vec3> read_points_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_points_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_points_csv: empty file " + path);
    std::vector<Vec3> pts;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string item;
        Vec3 p;
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(ss, item, ','))
                throw std::runtime_error("read_points_csv: short row at line " + std::to_string(line_no));
            p[k] = std::stod(item);
        }
        pts.push_back(p);
    }
    return pts;
}

void write_points_csv(const std::string& path, const std::vector<Vec3>& points) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_points_csv: cannot write " + path);
    out << "x,y,z\n";
    out.precision(17);
    for (const Vec3& p : points) out << p.x << ',' << p.y << ',' << p.z << "\n";
}

}  // namespace capflow
