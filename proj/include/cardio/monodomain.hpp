#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cardio/fem.hpp"
#include "cardio/ionic.hpp"
#include "cardio/mesh.hpp"
#include "cardio/sparse.hpp"

namespace cardio {

// Initial-condition presets for the transmembrane potential and the gate.
struct InitialCondition {
    enum class Kind { constant, gaussian_bump, linear_ramp, quadrants };
    Kind kind = Kind::quadrants;

    // constant
    double v0 = 2.0;

    // gaussian bump: base + amplitude * exp(-|x-center|^2 / (2 width^2))
    double base = -40.0;
    double amplitude = 42.0;
    double width = 0.4;
    Vec2 center{0.0, 0.0};

    // linear ramp in x from ramp_lo at the left edge to ramp_hi at the right
    double ramp_lo = -40.0;
    double ramp_hi = 1.0;

    // per-quadrant values by sign of (x, y): q1 (+,+), q2 (-,+), q3 (-,-),
    // q4 (+,-); nodes on the axes belong to the lower/left side. With
    // smooth_width > 0 the four values are blended by tanh(x/s)*tanh(y/s)
    // so the field is smooth (the default keeps probe traces grid-convergent).
    double q1 = 1.0;
    double q2 = -10.0;
    double q3 = -40.0;
    double q4 = -25.0;
    double smooth_width = 0.5;

    // gate: constant w0, or clamp(w_inf(v0), w_floor, 1)
    enum class GateInit { constant, equilibrium };
    GateInit gate = GateInit::constant;
    double w0 = 0.0;
    double w_floor = 0.01;
};

std::vector<double> initial_voltage(const Mesh& mesh, const InitialCondition& ic);
std::vector<double> initial_gate(std::span<const double> v, const InitialCondition& ic,
                                 const MorrisLecarParams& p);

struct MonodomainState {
    double t = 0.0;
    int step_index = 0;
    std::vector<double> v;  // mV, nodal
    std::vector<double> w;  // fraction, nodal
};

// Space-time applied current; empty function means zero.
struct Stimulus {
    std::function<double(Vec2, double)> i_app;
    bool is_zero() const { return !i_app; }
    std::vector<double> nodal(const Mesh& mesh, double t) const;
};

struct StepOptions {
    bool mass_lumping = false;      // lumped ionic-term application
    double solver_tol = 1e-10;
    int solver_max_iter = 0;        // 0 -> solver default
    double divergence_guard = 500.0;  // abort when max |v| exceeds this (mV)
    bool check_gate_bounds = false;   // enforce w in (0,1] at init and each step
};

// enforce_gate_bounds per StepOptions::check_gate_bounds
MonodomainState init_state(const Mesh& mesh, const InitialCondition& ic,
                           const MorrisLecarParams& p, bool enforce_gate_bounds = false);

// One semi-implicit Backward Euler step of M C_m dv/dt + A v + M I_ion = M i_app:
// the gate advances first by the exact exponential update at frozen v^n, then
// (C_m M + dt A) v^{n+1} = C_m M v^n - dt M I_ion(v^n, w^{n+1}) + dt M i_app(t^{n+1}).
MonodomainState monodomain_step(const MonodomainState& state, double dt,
                                const SparseSymMatrix& M, const SparseSymMatrix& A,
                                const MorrisLecarParams& p, const Mesh& mesh,
                                const Stimulus& stim = {}, const StepOptions& opts = {});

struct ProbeSeries {
    std::vector<Vec2> points;
    std::vector<int> node_indices;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // [probe][step]
};

struct Snapshots {
    std::vector<int> steps;
    std::vector<std::vector<double>> v;
    std::vector<std::vector<double>> u_i;  // bidomain only
    std::vector<std::vector<double>> u_e;  // bidomain only
};

struct RunResult {
    ProbeSeries probes;
    Snapshots snapshots;
    MonodomainState final_state;
    double min_w_seen = 1.0;
    double max_w_seen = 0.0;
    double min_tau_w_seen = 1.0;
};

// Runs n_steps with probe recording every step and full snapshots at the
// requested step indices (0 = initial state). sigma = 0 fields run with an
// empty stiffness matrix.
RunResult monodomain_run(const Mesh& mesh, const MorrisLecarParams& p,
                         const ConductivityField& field, const InitialCondition& ic,
                         const Stimulus& stim, double dt, int n_steps,
                         std::span<const Vec2> probes, std::span<const int> snapshot_steps,
                         const StepOptions& opts = {});

// Helpers shared with the bidomain runner.
std::vector<int> resolve_probes(const Mesh& mesh, std::span<const Vec2> probes);
SparseSymMatrix stiffness_or_zero(const Mesh& mesh, const ConductivityField& field);

}  // namespace cardio
