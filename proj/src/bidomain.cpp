#include "cardio/bidomain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cardio/solver.hpp"

namespace cardio {

CompatibilityResult check_compatibility(std::span<const double> i_app_i,
                                        std::span<const double> i_app_e,
                                        const SparseSymMatrix& M, double tol) {
    if (static_cast<int>(i_app_i.size()) != M.dim() ||
        static_cast<int>(i_app_e.size()) != M.dim()) {
        throw std::invalid_argument("check_compatibility: forcing size mismatch");
    }
    std::vector<double> diff(i_app_i.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = i_app_i[k] - i_app_e[k];
    const std::vector<double> m_diff = M.multiply(diff);
    const std::vector<double> m_i = M.multiply(i_app_i);
    double integral_diff = 0.0;
    double integral_i = 0.0;
    for (std::size_t k = 0; k < diff.size(); ++k) {
        integral_diff += m_diff[k];
        integral_i += m_i[k];
    }
    CompatibilityResult r;
    r.residual = std::abs(integral_diff);
    r.scale = tol * (1.0 + std::abs(integral_i));
    r.ok = r.residual <= r.scale;
    return r;
}

SparseSymMatrix assemble_bidomain_system(const SparseSymMatrix& M, const SparseSymMatrix& A_i,
                                         const SparseSymMatrix& A_e, double c_m, double dt,
                                         double epsilon) {
    const int n = M.dim();
    if (A_i.dim() != n || A_e.dim() != n) {
        throw std::invalid_argument("assemble_bidomain_system: dimension mismatch");
    }
    SparseSymMatrix::Builder builder(2 * n);
    M.for_each([&](int i, int j, double v) {
        builder.add(i, j, (c_m + epsilon) * v);
        builder.add(n + i, n + j, (c_m + epsilon) * v);
        builder.add(i, n + j, -c_m * v);
        builder.add(n + i, j, -c_m * v);
    });
    A_i.for_each([&](int i, int j, double v) { builder.add(i, j, dt * v); });
    A_e.for_each([&](int i, int j, double v) { builder.add(n + i, n + j, dt * v); });
    return builder.finalize();
}

BidomainState bidomain_init(const Mesh& mesh, const InitialCondition& ic,
                            const MorrisLecarParams& p, double epsilon,
                            bool enforce_gate_bounds) {
    if (epsilon < 0.0) throw std::invalid_argument("bidomain_init: epsilon must be >= 0");
    const MonodomainState mono = init_state(mesh, ic, p, enforce_gate_bounds);
    BidomainState state;
    state.epsilon = epsilon;
    state.v = mono.v;
    state.w = mono.w;
    state.u_i = mono.v;  // gauge: u_e = 0, u_i = v
    state.u_e.assign(mono.v.size(), 0.0);
    return state;
}

BidomainState bidomain_step(const BidomainState& state, double dt, const SparseSymMatrix& M,
                            const SparseSymMatrix& A_i, const SparseSymMatrix& A_e,
                            const MorrisLecarParams& p, const Mesh& mesh,
                            const Stimulus& stim_i, const Stimulus& stim_e,
                            const StepOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("bidomain_step: dt must be positive");
    const SparseSymMatrix system =
        assemble_bidomain_system(M, A_i, A_e, p.c_m, dt, state.epsilon);
    return bidomain_step_with_system(state, dt, M, system, p, mesh, stim_i, stim_e, opts);
}

BidomainState bidomain_step_with_system(const BidomainState& state, double dt,
                                        const SparseSymMatrix& M,
                                        const SparseSymMatrix& system,
                                        const MorrisLecarParams& p, const Mesh& mesh,
                                        const Stimulus& stim_i, const Stimulus& stim_e,
                                        const StepOptions& opts) {
    if (opts.mass_lumping) {
        throw std::invalid_argument("bidomain step: mass lumping is a monodomain option");
    }
    const std::size_t n = state.v.size();
    BidomainState next;
    next.epsilon = state.epsilon;
    next.step_index = state.step_index + 1;
    next.t = state.t + dt;

    next.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        next.w[i] = step_gating(state.v[i], state.w[i], dt, p);
    }
    if (opts.check_gate_bounds) {
        for (double w : next.w) {
            if (!(w > 0.0) || w > 1.0) {
                throw std::runtime_error("bidomain step: gate left (0,1]");
            }
        }
    }

    std::vector<double> ion(n);
    for (std::size_t i = 0; i < n; ++i) ion[i] = i_ion(state.v[i], next.w[i], p);

    const std::vector<double> m_v = M.multiply(state.v);
    const std::vector<double> m_ion = M.multiply(ion);

    // intracellular row:  C_m M v^n + eps M u_i^n + dt M s_i - dt M ion
    // extracellular row (negated equation):
    //                    -C_m M v^n + eps M u_e^n - dt M s_e + dt M ion
    std::vector<double> rhs(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = p.c_m * m_v[i] - dt * m_ion[i];
        rhs[n + i] = -p.c_m * m_v[i] + dt * m_ion[i];
    }
    if (state.epsilon > 0.0) {
        const std::vector<double> m_ui = M.multiply(state.u_i);
        const std::vector<double> m_ue = M.multiply(state.u_e);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] += state.epsilon * m_ui[i];
            rhs[n + i] += state.epsilon * m_ue[i];
        }
    }
    const bool has_forcing = !stim_i.is_zero() || !stim_e.is_zero();
    if (has_forcing) {
        const std::vector<double> s_i = stim_i.nodal(mesh, next.t);
        const std::vector<double> s_e = stim_e.nodal(mesh, next.t);
        if (state.epsilon == 0.0) {
            const CompatibilityResult compat = check_compatibility(s_i, s_e, M, 1e-10);
            if (!compat.ok) {
                throw std::invalid_argument(
                    "bidomain step: incompatible applied currents (residual " +
                    std::to_string(compat.residual) + ")");
            }
        }
        const std::vector<double> m_si = M.multiply(s_i);
        const std::vector<double> m_se = M.multiply(s_e);
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] += dt * m_si[i];
            rhs[n + i] -= dt * m_se[i];
        }
    }

    SolveOptions solve_opts;
    solve_opts.tol = opts.solver_tol;
    solve_opts.max_iter = opts.solver_max_iter;
    solve_opts.deflate_constant = state.epsilon == 0.0;
    const std::vector<double> x = solve_spd(system, rhs, solve_opts);

    next.u_i.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    next.u_e.assign(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());

    // gauge: shift both potentials so u_e has zero mean, leaving v untouched
    double mean_ue = 0.0;
    for (double u : next.u_e) mean_ue += u;
    mean_ue /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        next.u_i[i] -= mean_ue;
        next.u_e[i] -= mean_ue;
    }

    next.v.resize(n);
    double vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        next.v[i] = next.u_i[i] - next.u_e[i];
        if (!std::isfinite(next.v[i]) || !std::isfinite(next.w[i])) {
            throw std::runtime_error("bidomain step " + std::to_string(next.step_index) +
                                     ": non-finite state");
        }
        vmax = std::max(vmax, std::abs(next.v[i]));
    }
    if (vmax > opts.divergence_guard) {
        throw std::runtime_error("bidomain step " + std::to_string(next.step_index) +
                                 ": |v| reached " + std::to_string(vmax) +
                                 " mV (divergence guard)");
    }
    return next;
}

BidomainRunResult bidomain_run(const Mesh& mesh, const MorrisLecarParams& p,
                               const ConductivityField& field_i,
                               const ConductivityField& field_e, const InitialCondition& ic,
                               double epsilon, const Stimulus& stim_i, const Stimulus& stim_e,
                               double dt, int n_steps, std::span<const Vec2> probes,
                               std::span<const int> snapshot_steps, const StepOptions& opts,
                               bool keep_history) {
    p.validate();
    const SparseSymMatrix M = assemble_mass(mesh);
    const SparseSymMatrix A_i = stiffness_or_zero(mesh, field_i);
    const SparseSymMatrix A_e = stiffness_or_zero(mesh, field_e);
    const SparseSymMatrix system =
        n_steps > 0 ? assemble_bidomain_system(M, A_i, A_e, p.c_m, dt, epsilon)
                    : SparseSymMatrix{};

    BidomainRunResult result;
    result.probes.points.assign(probes.begin(), probes.end());
    result.probes.node_indices = resolve_probes(mesh, probes);
    result.probes.values.resize(probes.size());
    result.snapshots.steps.assign(snapshot_steps.begin(), snapshot_steps.end());
    result.snapshots.v.resize(snapshot_steps.size());
    result.snapshots.u_i.resize(snapshot_steps.size());
    result.snapshots.u_e.resize(snapshot_steps.size());

    BidomainState state = bidomain_init(mesh, ic, p, epsilon, opts.check_gate_bounds);

    auto record = [&](const BidomainState& s) {
        result.probes.times.push_back(s.t);
        for (std::size_t k = 0; k < result.probes.node_indices.size(); ++k) {
            result.probes.values[k].push_back(
                s.v[static_cast<std::size_t>(result.probes.node_indices[k])]);
        }
        for (std::size_t k = 0; k < result.snapshots.steps.size(); ++k) {
            if (result.snapshots.steps[k] == s.step_index) {
                result.snapshots.v[k] = s.v;
                result.snapshots.u_i[k] = s.u_i;
                result.snapshots.u_e[k] = s.u_e;
            }
        }
        if (keep_history) result.v_history.push_back(s.v);
    };

    record(state);
    for (int k = 0; k < n_steps; ++k) {
        state = bidomain_step_with_system(state, dt, M, system, p, mesh, stim_i, stim_e, opts);
        record(state);
    }
    result.final_state = std::move(state);
    return result;
}

double reduction_check(const Mesh& mesh, const MorrisLecarParams& p,
                       const ConductivityField& field_i, double lambda_ratio,
                       const InitialCondition& ic, double dt, int n_steps,
                       const StepOptions& opts) {
    if (!(lambda_ratio > 0.0)) {
        throw std::invalid_argument("reduction_check: lambda must be positive");
    }
    ConductivityField field_mono = field_i;
    field_mono.lambda_ratio = lambda_ratio;
    field_mono = field_mono.monodomain_reduced();
    const ConductivityField field_e = field_i.scaled(lambda_ratio);

    const BidomainRunResult bido =
        bidomain_run(mesh, p, field_i, field_e, ic, 0.0, {}, {}, dt, n_steps, {}, {}, opts,
                     /*keep_history=*/true);

    const SparseSymMatrix M = assemble_mass(mesh);
    const SparseSymMatrix A = stiffness_or_zero(mesh, field_mono);
    MonodomainState mono = init_state(mesh, ic, p);

    double max_dev = 0.0;
    auto compare = [&](const std::vector<double>& vb, const std::vector<double>& vm) {
        for (std::size_t i = 0; i < vb.size(); ++i) {
            max_dev = std::max(max_dev, std::abs(vb[i] - vm[i]));
        }
    };
    compare(bido.v_history[0], mono.v);
    for (int k = 0; k < n_steps; ++k) {
        mono = monodomain_step(mono, dt, M, A, p, mesh, {}, opts);
        compare(bido.v_history[static_cast<std::size_t>(k) + 1], mono.v);
    }
    return max_dev;
}

}  // namespace cardio
