// Command-line front end: one subcommand per experiment plus the
// verification suite. Exit codes: 0 success, 1 experiment or verification
// failure, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cardio/bidomain.hpp"
#include "cardio/config.hpp"
#include "cardio/experiments.hpp"
#include "cardio/io.hpp"

using namespace cardio;

namespace {

SimConfig load(const std::string& config_path) {
    if (config_path.empty()) {
        SimConfig cfg;
        cfg.validate();
        return cfg;
    }
    return load_config_file(config_path);
}

int cmd_simulate(const SimConfig& cfg, const OutputOptions& out) {
    const SimulateResult r = run_simulate(cfg, out);
    std::printf("simulate: %d steps on %d dofs, final probe range [%g, %g] mV\n", cfg.n_steps,
                (cfg.grid_n + 1) * (cfg.grid_n + 1), r.v_min_final, r.v_max_final);
    std::printf("outputs in %s\n", out.out_dir.string().c_str());
    return 0;
}

int cmd_grid_validation(const SimConfig& cfg, const OutputOptions& out) {
    const GridValidationResult r = experiment_grid_validation(cfg, out);
    std::printf("grid validation: dofs %d/%d/%d\n", r.dofs[0], r.dofs[1], r.dofs[2]);
    std::printf("  max rel diff 121->441:  %.6g\n", r.diff_coarse_mid);
    std::printf("  max rel diff 441->1681: %.6g\n", r.diff_mid_fine);
    std::printf("  monotone convergence: %s, within the 0.5%% reference: %s\n",
                r.monotone ? "yes" : "no", r.within_half_percent ? "yes" : "no");
    const bool ok = r.monotone && r.diff_mid_fine < 0.02;
    return ok ? 0 : 1;
}

int cmd_isochrones(const SimConfig& cfg, const OutputOptions& out) {
    const IsochroneResult r = experiment_isochrones(cfg, out);
    for (std::size_t k = 0; k < r.steps.size(); ++k) {
        std::printf("step %4d: v in [%g, %g]\n", r.steps[k], r.v_min[k], r.v_max[k]);
    }
    const double ratio = r.initial_spread > 0.0 ? r.final_spread / r.initial_spread : 0.0;
    std::printf("final/initial spread ratio: %.3e\n", ratio);
    return ratio < 0.01 ? 0 : 1;
}

int cmd_verify(const std::vector<std::string>& suites, const OutputOptions& out) {
    const std::vector<VerifyCheck> checks = run_verification(suites);
    bool all_pass = true;
    for (const VerifyCheck& c : checks) {
        std::printf("%-20s %s  measured=%.6g threshold=%.6g\n", c.name.c_str(),
                    c.pass ? "pass" : "FAIL", c.measured, c.threshold);
        all_pass = all_pass && c.pass;
    }
    std::filesystem::create_directories(out.out_dir);
    std::ofstream os(out.out_dir / "verify_report.csv");
    write_verification_report(os, checks);
    return all_pass ? 0 : 1;
}

int cmd_mesh_info(const SimConfig& cfg, const OutputOptions& out, const std::string& vtk) {
    const Mesh mesh = build_structured_mesh(cfg.domain_a, cfg.domain_b, cfg.grid_n);
    double area = 0.0;
    for (int e = 0; e < mesh.triangle_count(); ++e) area += element_geometry(mesh, e).area;
    std::printf("domain [%g, %g]^2, n=%d\n", cfg.domain_a, cfg.domain_b, cfg.grid_n);
    std::printf("nodes: %d, triangles: %d, spacing: %g\n", mesh.node_count(),
                mesh.triangle_count(), mesh.spacing());
    std::printf("total area: %.17g\n", area);
    if (!vtk.empty()) {
        std::filesystem::create_directories(out.out_dir);
        std::ofstream os(out.out_dir / vtk);
        write_mesh_vtk(os, mesh, out.timestamps);
        std::printf("mesh written to %s\n", (out.out_dir / vtk).string().c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cardiosim: monodomain/bidomain Morris-Lecar tissue simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool no_timestamp = false;
    app.add_option("--config", config_path, "path to a key = value config file");
    app.add_option("--out", out_dir, "output directory (default: the config's output_dir)");
    app.add_flag("--no-timestamp", no_timestamp, "suppress timestamp lines in output files");

    auto* simulate = app.add_subcommand("simulate", "run the configured model");
    auto* grid = app.add_subcommand("grid-validation", "grid validation study on n = 10/20/40");
    auto* iso = app.add_subcommand("isochrones", "iso-potential snapshots and spread report");
    auto* verify = app.add_subcommand("verify", "run the property suites");
    std::vector<std::string> suites;
    verify->add_option("--suite", suites,
                       "suite selection (repeatable); default runs everything");
    auto* mesh_info = app.add_subcommand("mesh-info", "print mesh statistics");
    std::string mesh_vtk;
    mesh_info->add_option("--vtk", mesh_vtk, "also write the mesh as legacy VTK");
    for (CLI::App* sub : {simulate, grid, iso, verify, mesh_info}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // command-line misuse is a configuration error
    }

    try {
        SimConfig cfg = load(config_path);
        OutputOptions out;
        out.out_dir = out_dir.empty() ? cfg.output_dir : out_dir;
        out.timestamps = !no_timestamp;
        if (simulate->parsed()) return cmd_simulate(cfg, out);
        if (grid->parsed()) return cmd_grid_validation(cfg, out);
        if (iso->parsed()) return cmd_isochrones(cfg, out);
        if (verify->parsed()) return cmd_verify(suites, out);
        if (mesh_info->parsed()) return cmd_mesh_info(cfg, out, mesh_vtk);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
