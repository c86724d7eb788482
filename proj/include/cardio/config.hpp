#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cardio/fem.hpp"
#include "cardio/ionic.hpp"
#include "cardio/mesh.hpp"
#include "cardio/monodomain.hpp"

namespace cardio {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ModelKind { monodomain, bidomain };

// Line-based "key = value" configuration ('#' comments, case-sensitive keys,
// unknown keys rejected). An empty file yields the defaults below: the
// bundled Morris-Lecar parameter set on [-1.25,1.25]^2, 41x41 grid,
// dt = 0.1 ms, 400 steps, quadrant initial condition, probes at the center
// and the four quadrant midpoints. The default freezes the gate (phi = 0):
// under the 'paper' sign orientation the v ~ 2 mV plateau only exists while
// w stays near zero, and the 400-step run diverges otherwise.
struct SimConfig {
    double domain_a = -1.25;
    double domain_b = 1.25;
    int grid_n = 40;
    double dt = 0.1;     // ms
    int n_steps = 400;
    ModelKind model = ModelKind::monodomain;
    double epsilon = 0.0;

    // ionic constants (phi/c_m defaults: see header comment)
    double v1 = -1.2, v2 = 18.0, v3 = -1.0, v4 = 14.5;
    double v_ca = 120.0, v_k = -70.0, v_l = -50.0;
    double g_ca = 3.0, g_k = 8.0, g_l = 4.0;
    double phi = 0.0;
    double c_m = 1.0;
    SignConvention sign_convention = SignConvention::paper;

    // conductivity; for bidomain runs these are the intracellular values
    // and D_e = lambda * D_i
    double sigma_l = 1.2e-3;
    double sigma_t = 2.5562e-4;
    double lambda = 1.0;
    double fiber_angle = 0.0;  // radians, constant

    InitialCondition ic;

    std::vector<Vec2> probes = {
        {0.0, 0.0}, {0.625, 0.625}, {-0.625, 0.625}, {-0.625, -0.625}, {0.625, -0.625}};
    std::vector<int> snapshot_steps = {0, 120, 210, 270, 310, 399};

    double solver_tol = 1e-10;
    int solver_max_iter = 0;
    bool mass_lumping = false;
    bool gate_bound_check = false;
    double divergence_guard = 500.0;
    std::string output_dir = "out";

    MorrisLecarParams params() const;
    ConductivityField field() const;
    StepOptions step_options() const;
    void validate() const;  // throws ConfigError naming the offending key
};

SimConfig parse_config(const std::string& text);
SimConfig load_config_file(const std::string& path);

}  // namespace cardio
