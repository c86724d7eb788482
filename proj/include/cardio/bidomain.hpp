#pragma once

#include <span>
#include <vector>

#include "cardio/fem.hpp"
#include "cardio/ionic.hpp"
#include "cardio/mesh.hpp"
#include "cardio/monodomain.hpp"
#include "cardio/sparse.hpp"

namespace cardio {

struct BidomainState {
    double t = 0.0;
    int step_index = 0;
    std::vector<double> u_i;  // mV, nodal
    std::vector<double> u_e;  // mV, nodal, zero mean (gauge)
    std::vector<double> v;    // u_i - u_e
    std::vector<double> w;
    double epsilon = 0.0;     // regularization weight, >= 0
};

struct CompatibilityResult {
    bool ok = false;
    double residual = 0.0;  // |1^T M (i_app_i - i_app_e)|
    double scale = 0.0;     // tol * (1 + |1^T M i_app_i|)
};

// Solvability condition for pure-Neumann forcing: integrals of the intra-
// and extracellular applied currents must match.
CompatibilityResult check_compatibility(std::span<const double> i_app_i,
                                        std::span<const double> i_app_e,
                                        const SparseSymMatrix& M, double tol);

// Symmetric 2N x 2N operator of one Backward Euler step,
//   [ (C_m+eps) M + dt A_i   -C_m M           ]
//   [ -C_m M                 (C_m+eps) M + dt A_e ],
// built once per (dt, eps) and reused across steps. With eps = 0 the
// all-ones vector spans the null space and solves are mean-deflated.
SparseSymMatrix assemble_bidomain_system(const SparseSymMatrix& M,
                                         const SparseSymMatrix& A_i,
                                         const SparseSymMatrix& A_e, double c_m, double dt,
                                         double epsilon);

BidomainState bidomain_init(const Mesh& mesh, const InitialCondition& ic,
                            const MorrisLecarParams& p, double epsilon,
                            bool enforce_gate_bounds = false);

// One step: gate update as in the monodomain scheme, then the block solve
// with the extracellular equation negated (so the operator is symmetric) and
// the gauge re-fixed to mean(u_e) = 0.
BidomainState bidomain_step(const BidomainState& state, double dt, const SparseSymMatrix& M,
                            const SparseSymMatrix& A_i, const SparseSymMatrix& A_e,
                            const MorrisLecarParams& p, const Mesh& mesh,
                            const Stimulus& stim_i = {}, const Stimulus& stim_e = {},
                            const StepOptions& opts = {});

// Same step with the block operator pre-assembled (reused across a run).
BidomainState bidomain_step_with_system(const BidomainState& state, double dt,
                                        const SparseSymMatrix& M,
                                        const SparseSymMatrix& system,
                                        const MorrisLecarParams& p, const Mesh& mesh,
                                        const Stimulus& stim_i = {},
                                        const Stimulus& stim_e = {},
                                        const StepOptions& opts = {});

struct BidomainRunResult {
    ProbeSeries probes;
    Snapshots snapshots;
    BidomainState final_state;
    std::vector<std::vector<double>> v_history;  // filled when keep_history set
};

BidomainRunResult bidomain_run(const Mesh& mesh, const MorrisLecarParams& p,
                               const ConductivityField& field_i,
                               const ConductivityField& field_e, const InitialCondition& ic,
                               double epsilon, const Stimulus& stim_i, const Stimulus& stim_e,
                               double dt, int n_steps, std::span<const Vec2> probes,
                               std::span<const int> snapshot_steps,
                               const StepOptions& opts = {}, bool keep_history = false);

// Runs the bidomain model with (D_i, D_e = lambda D_i) against the monodomain
// model with D = lambda D_i / (1 + lambda) from identical initial data and no
// forcing; returns the max over steps and nodes of |v_bidomain - v_monodomain|.
double reduction_check(const Mesh& mesh, const MorrisLecarParams& p,
                       const ConductivityField& field_i, double lambda_ratio,
                       const InitialCondition& ic, double dt, int n_steps,
                       const StepOptions& opts = {});

}  // namespace cardio
