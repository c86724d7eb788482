#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cardio/config.hpp"
#include "cardio/monodomain.hpp"

namespace cardio {

struct OutputOptions {
    std::filesystem::path out_dir = "out";
    bool timestamps = true;
};

struct SimulateResult {
    ProbeSeries probes;
    double v_min_final = 0.0;
    double v_max_final = 0.0;
};

// Runs the configured model, writes probes.csv, snapshot_stepNNNN.vtk for
// each requested step, and simulate_report.txt.
SimulateResult run_simulate(const SimConfig& cfg, const OutputOptions& out);

struct GridValidationResult {
    std::array<int, 3> grid_n{10, 20, 40};
    std::array<int, 3> dofs{};
    std::array<int, 3> elements{};
    double dynamic_range = 0.0;       // of the finest probe trace
    double diff_coarse_mid = 0.0;     // 121 -> 441, relative to dynamic_range
    double diff_mid_fine = 0.0;       // 441 -> 1681
    bool monotone = false;
    bool within_half_percent = false;  // the 0.5% reference variation
};

// Three-grid validation study: the configured model on n = 10/20/40, comparing the
// shared (0,0) probe trace. The three runs execute concurrently. Writes one
// trace CSV per grid plus a report.
GridValidationResult experiment_grid_validation(const SimConfig& cfg,
                                                const OutputOptions& out);

struct IsochroneResult {
    std::vector<int> steps;
    std::vector<double> v_min;
    std::vector<double> v_max;
    double initial_spread = 0.0;
    double final_spread = 0.0;
};

// Iso-potential snapshots at the configured steps (default
// 0, 120, 210, 270, 310, 399) plus the min/max report.
IsochroneResult experiment_isochrones(const SimConfig& cfg, const OutputOptions& out);

struct VerifyCheck {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

// Property suites on small fixed instances. Known suite names:
// mass_spd, gating_bounds, reduction, stability, compatibility, ellipticity,
// block_null. Empty selection runs all.
std::vector<VerifyCheck> run_verification(const std::vector<std::string>& suites);

void write_verification_report(std::ostream& os, const std::vector<VerifyCheck>& checks);

}  // namespace cardio
