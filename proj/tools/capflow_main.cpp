// Command-line front end: verify / construct / cover pipelines plus the
// functional and kernel utilities.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "capflow/functionals.hpp"
#include "capflow/oseen.hpp"
#include "capflow/pipeline.hpp"

using namespace capflow;

namespace {

RunConfig load_config(const std::string& config_path, std::uint64_t seed_override,
                      const std::string& out_override, const std::string& points_override,
                      const std::string& field_override) {
    RunConfig rc = config_path.empty() ? RunConfig{} : RunConfig::from_file(config_path);
    if (seed_override != 0) rc.seed = seed_override;
    if (!out_override.empty()) rc.out_dir = out_override;
    if (!points_override.empty()) rc.points_csv = points_override;
    if (!field_override.empty()) {
        if (std::filesystem::exists(field_override)) {
            rc.field_file = field_override;
        } else {
            rc.field_preset = field_override;
            rc.field_file.clear();
        }
    }
    return rc;
}

void print_summary(const Report& rep) {
    for (const auto& r : rep.records) {
        const char* tag = r.status == "pass" ? "PASS" : (r.status == "fail" ? "FAIL" : "REC ");
        std::cout << "[" << tag << "] " << r.name << "\n";
    }
    std::cout << rep.title << ": " << rep.passed() << " passed, " << rep.failed() << " failed, "
              << rep.recorded_count() << " recorded\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capsule-scale analysis of divergence-free velocity fields"};
    app.require_subcommand(1);

    std::string config_path, out_dir, points_csv, field_spec, capsules_file;
    std::uint64_t seed = 0;
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--seed", seed, "override the run seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--points", points_csv, "point list CSV (header x,y,z)");
    app.add_option("--field", field_spec, "field preset name or VF3D grid path");

    auto* verify = app.add_subcommand("verify", "run the full property suite");
    auto* construct = app.add_subcommand("construct", "build capsules over the point source");
    auto* cover = app.add_subcommand("cover", "greedy covering over a capsule family");
    cover->add_option("capsules", capsules_file, "capsule family JSON")->required();

    // functional: line | osc | moment | thresholds
    auto* functional = app.add_subcommand("functional", "evaluate hypothesis functionals");
    std::string fkind = "thresholds";
    std::vector<double> fx0{0, 0, 0}, fx1{1, 0, 0};
    double fR = 1.0, fs = 2.0, falpha = 1.0 / 9.0, fbeta = 29.0 / 193.0;
    functional->add_option("kind", fkind, "line | osc | moment | thresholds")->required();
    functional->add_option("--x0", fx0, "segment start / ball center")->expected(3);
    functional->add_option("--x1", fx1, "segment end")->expected(3);
    functional->add_option("--R", fR, "ball radius");
    functional->add_option("--s", fs, "oscillation exponent");
    functional->add_option("--alpha", falpha, "mean-oscillation growth exponent");
    functional->add_option("--beta", fbeta, "line-integral growth exponent");

    // kernel: gamma/gradient tables and residual sweeps
    auto* kernel = app.add_subcommand("kernel", "drift kernel tables and residual sweep");
    double knu = 1.0, kU = 1.0;
    int ktable = 0;
    kernel->add_option("--nu", knu, "viscosity");
    kernel->add_option("--U", kU, "drift speed");
    kernel->add_option("--table", ktable, "emit an N-point kernel table CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) {
            const Report rep = run_verify(load_config(config_path, seed, out_dir, points_csv, field_spec));
            print_summary(rep);
            return rep.exit_code();
        }
        if (*construct) {
            RunConfig rc = load_config(config_path, seed, out_dir, points_csv, field_spec);
            if (rc.points_csv.empty() && rc.lattice_n == 0) rc.lattice_n = 4;
            const Report rep = run_construct(rc);
            print_summary(rep);
            return rep.exit_code();
        }
        if (*cover) {
            const Report rep =
                run_cover(load_config(config_path, seed, out_dir, points_csv, field_spec), capsules_file);
            print_summary(rep);
            return rep.exit_code();
        }
        if (*functional) {
            ordered_json out;
            const RunConfig rc = load_config(config_path, seed, out_dir, points_csv, field_spec);
            if (fkind == "line") {
                const VectorField f = rc.make_field();
                out["line_integral"] =
                    line_integral(f, {fx0[0], fx0[1], fx0[2]}, {fx1[0], fx1[1], fx1[2]});
            } else if (fkind == "osc") {
                const VectorField f = rc.make_field();
                out["mean_oscillation"] = mean_oscillation(f, {fx0[0], fx0[1], fx0[2]}, fR, fs,
                                                           QuadratureSpec::tensor(16));
            } else if (fkind == "moment") {
                const VectorField f = rc.make_field();
                out["stream_moment"] = stream_moment(f, {fx0[0], fx0[1], fx0[2]}, fR, kE1,
                                                     QuadratureSpec::tensor(16));
            } else if (fkind == "thresholds") {
                out["p_alpha"] = p_alpha(falpha);
                out["p_beta"] = p_beta(fbeta);
                out["alpha_crit"] = "1/9";
                out["beta_crit"] = "29/193";
                if (fs > 3.0) {
                    const CompetitorExponents ce = competitor_exponents(fs);
                    out["competitors"] = {{"first", ce.seregin}, {"second", ce.chae_wolf}};
                }
            } else {
                std::cerr << "unknown functional kind: " << fkind << "\n";
                return 2;
            }
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*kernel) {
            const OseenKernel k(knu, kU);
            if (ktable > 0) {
                const std::string dir = out_dir.empty() ? "." : out_dir;
                std::filesystem::create_directories(dir);
                const std::string path = (std::filesystem::path(dir) / "kernel_table.csv").string();
                std::ofstream csv(path);
                csv << "x1,x2,x3,gamma,g1,g2,g3\n";
                csv.precision(17);
                for (int i = 0; i < ktable; ++i) {
                    const double r = 0.1 * std::pow(100.0, rng::uniform(42, i, 7));
                    const Vec3 x = r * rng::on_unit_sphere(42, i);
                    const double g = gamma(k, x);
                    const Vec3 dg = grad_gamma(k, x);
                    csv << x.x << ',' << x.y << ',' << x.z << ',' << g << ',' << dg.x << ','
                        << dg.y << ',' << dg.z << "\n";
                }
                std::cout << "wrote " << path << "\n";
            }
            double worst = 0.0;
            int underflow = 0;
            for (int i = 0; i < 1000; ++i) {
                const double r = 0.1 * std::pow(100.0, rng::uniform(43, i, 7));
                const Vec3 x = r * rng::on_unit_sphere(43, i);
                if (gamma(k, x) < 1e-290) {
                    ++underflow;
                    continue;
                }
                worst = std::max(worst, pde_residual(k, x).relative);
            }
            ordered_json out{{"nu", knu}, {"U", kU}, {"max_rel_residual", worst},
                             {"underflow_points", underflow}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 101;
    }
    return 0;
}
