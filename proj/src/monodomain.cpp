#include "cardio/monodomain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cardio/solver.hpp"

namespace cardio {

std::vector<double> initial_voltage(const Mesh& mesh, const InitialCondition& ic) {
    std::vector<double> v(static_cast<std::size_t>(mesh.node_count()));
    switch (ic.kind) {
        case InitialCondition::Kind::constant:
            std::fill(v.begin(), v.end(), ic.v0);
            break;
        case InitialCondition::Kind::gaussian_bump:
            for (int i = 0; i < mesh.node_count(); ++i) {
                const Vec2 d = mesh.nodes[static_cast<std::size_t>(i)] - ic.center;
                v[static_cast<std::size_t>(i)] =
                    ic.base + ic.amplitude * std::exp(-dot(d, d) / (2.0 * ic.width * ic.width));
            }
            break;
        case InitialCondition::Kind::linear_ramp:
            for (int i = 0; i < mesh.node_count(); ++i) {
                const double s = (mesh.nodes[static_cast<std::size_t>(i)].x - mesh.a) /
                                 (mesh.b - mesh.a);
                v[static_cast<std::size_t>(i)] = ic.ramp_lo + s * (ic.ramp_hi - ic.ramp_lo);
            }
            break;
        case InitialCondition::Kind::quadrants:
            for (int i = 0; i < mesh.node_count(); ++i) {
                const Vec2 pt = mesh.nodes[static_cast<std::size_t>(i)];
                if (ic.smooth_width > 0.0) {
                    const double tx = std::tanh(pt.x / ic.smooth_width);
                    const double ty = std::tanh(pt.y / ic.smooth_width);
                    const double c0 = 0.25 * (ic.q1 + ic.q2 + ic.q3 + ic.q4);
                    const double cx = 0.25 * (ic.q1 - ic.q2 - ic.q3 + ic.q4);
                    const double cy = 0.25 * (ic.q1 + ic.q2 - ic.q3 - ic.q4);
                    const double cxy = 0.25 * (ic.q1 - ic.q2 + ic.q3 - ic.q4);
                    v[static_cast<std::size_t>(i)] = c0 + cx * tx + cy * ty + cxy * tx * ty;
                } else {
                    // ties on the axes resolve toward the lower-left quadrant
                    const bool right = pt.x > 0.0;
                    const bool top = pt.y > 0.0;
                    v[static_cast<std::size_t>(i)] =
                        right ? (top ? ic.q1 : ic.q4) : (top ? ic.q2 : ic.q3);
                }
            }
            break;
    }
    return v;
}

std::vector<double> initial_gate(std::span<const double> v, const InitialCondition& ic,
                                 const MorrisLecarParams& p) {
    std::vector<double> w(v.size());
    if (ic.gate == InitialCondition::GateInit::constant) {
        std::fill(w.begin(), w.end(), ic.w0);
    } else {
        for (std::size_t i = 0; i < v.size(); ++i) {
            w[i] = std::clamp(w_inf(v[i], p), ic.w_floor, 1.0);
        }
    }
    return w;
}

std::vector<double> Stimulus::nodal(const Mesh& mesh, double t) const {
    std::vector<double> s(static_cast<std::size_t>(mesh.node_count()), 0.0);
    if (i_app) {
        for (int i = 0; i < mesh.node_count(); ++i) {
            s[static_cast<std::size_t>(i)] = i_app(mesh.nodes[static_cast<std::size_t>(i)], t);
        }
    }
    return s;
}

MonodomainState init_state(const Mesh& mesh, const InitialCondition& ic,
                           const MorrisLecarParams& p, bool enforce_gate_bounds) {
    MonodomainState state;
    state.v = initial_voltage(mesh, ic);
    state.w = initial_gate(state.v, ic, p);
    if (enforce_gate_bounds) {
        for (double w : state.w) {
            if (!(w > 0.0) || w > 1.0) {
                throw std::invalid_argument(
                    "init_state: gate bound checking requires w0 in (0, 1], got " +
                    std::to_string(w));
            }
        }
    }
    return state;
}

namespace {

void check_finite(const std::vector<double>& x, const char* what, int step_index) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw std::runtime_error(std::string("monodomain step ") +
                                     std::to_string(step_index) + ": non-finite " + what);
        }
    }
}

// Pre-assembled pieces of one Backward Euler step. With mass lumping the
// row-sum diagonal replaces M wherever it multiplies nodal data (inertia,
// ionic term, stimulus); lumping only the ionic term would amplify the
// explicit reaction on the highest-frequency modes and break the dt = 0.1
// step stability.
struct StepSystem {
    SparseSymMatrix system;        // C_m M + dt A (M lumped when requested)
    const SparseSymMatrix* mass = nullptr;
    std::vector<double> lumped;    // row sums, when lumping
    bool lumping = false;

    void apply_mass(const std::vector<double>& x, std::vector<double>& y) const {
        if (lumping) {
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = lumped[i] * x[i];
        } else {
            mass->multiply(x, y);
        }
    }
};

SparseSymMatrix diagonal_matrix(const std::vector<double>& d) {
    SparseSymMatrix::Builder builder(static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) {
        builder.add(static_cast<int>(i), static_cast<int>(i), d[i]);
    }
    return builder.finalize();
}

StepSystem make_step_system(const SparseSymMatrix& M, const SparseSymMatrix& A, double c_m,
                            double dt, bool lumping) {
    StepSystem s;
    s.mass = &M;
    s.lumping = lumping;
    if (lumping) {
        s.lumped = M.row_sums();
        s.system = sparse_sum(diagonal_matrix(s.lumped), A, c_m, dt);
    } else {
        s.system = sparse_sum(M, A, c_m, dt);
    }
    return s;
}

MonodomainState step_with_system(const MonodomainState& state, double dt,
                                 const StepSystem& sys, const MorrisLecarParams& p,
                                 const Mesh& mesh, const Stimulus& stim,
                                 const StepOptions& opts) {
    const std::size_t n = state.v.size();
    MonodomainState next;
    next.step_index = state.step_index + 1;
    next.t = state.t + dt;

    next.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        next.w[i] = step_gating(state.v[i], state.w[i], dt, p);
    }
    if (opts.check_gate_bounds) {
        for (double w : next.w) {
            if (!(w > 0.0) || w > 1.0) {
                throw std::runtime_error("monodomain step: gate left (0,1]");
            }
        }
    }

    std::vector<double> ion(n);
    for (std::size_t i = 0; i < n; ++i) {
        ion[i] = i_ion(state.v[i], next.w[i], p);
    }

    // rhs = C_m M v^n - dt (M ion) + dt (M i_app)
    std::vector<double> rhs(n);
    std::vector<double> scratch(n);
    sys.apply_mass(state.v, rhs);
    for (double& r : rhs) r *= p.c_m;
    sys.apply_mass(ion, scratch);
    for (std::size_t i = 0; i < n; ++i) rhs[i] -= dt * scratch[i];
    if (!stim.is_zero()) {
        const std::vector<double> app = stim.nodal(mesh, next.t);
        sys.apply_mass(app, scratch);
        for (std::size_t i = 0; i < n; ++i) rhs[i] += dt * scratch[i];
    }

    SolveOptions solve_opts;
    solve_opts.tol = opts.solver_tol;
    solve_opts.max_iter = opts.solver_max_iter;
    next.v = solve_spd(sys.system, rhs, solve_opts);

    check_finite(next.v, "v", next.step_index);
    check_finite(next.w, "w", next.step_index);
    double vmax = 0.0;
    for (double v : next.v) vmax = std::max(vmax, std::abs(v));
    if (vmax > opts.divergence_guard) {
        throw std::runtime_error("monodomain step " + std::to_string(next.step_index) +
                                 ": |v| reached " + std::to_string(vmax) +
                                 " mV (divergence guard " +
                                 std::to_string(opts.divergence_guard) +
                                 "; check sign convention / time step)");
    }
    return next;
}

}  // namespace

MonodomainState monodomain_step(const MonodomainState& state, double dt,
                                const SparseSymMatrix& M, const SparseSymMatrix& A,
                                const MorrisLecarParams& p, const Mesh& mesh,
                                const Stimulus& stim, const StepOptions& opts) {
    if (!(dt > 0.0)) throw std::invalid_argument("monodomain_step: dt must be positive");
    if (M.dim() != static_cast<int>(state.v.size()) || A.dim() != M.dim()) {
        throw std::invalid_argument("monodomain_step: matrix/state size mismatch");
    }
    const StepSystem sys = make_step_system(M, A, p.c_m, dt, opts.mass_lumping);
    return step_with_system(state, dt, sys, p, mesh, stim, opts);
}

std::vector<int> resolve_probes(const Mesh& mesh, std::span<const Vec2> probes) {
    std::vector<int> idx;
    idx.reserve(probes.size());
    // snap tolerance: any interior point is within half a cell diagonal of a node
    const double tol = mesh.spacing() * 0.7072;
    for (const Vec2& pt : probes) idx.push_back(locate_node(mesh, pt, tol));
    return idx;
}

SparseSymMatrix stiffness_or_zero(const Mesh& mesh, const ConductivityField& field) {
    if (field.is_zero()) return sparse_zero(mesh.node_count());
    return assemble_stiffness(mesh, field);
}

RunResult monodomain_run(const Mesh& mesh, const MorrisLecarParams& p,
                         const ConductivityField& field, const InitialCondition& ic,
                         const Stimulus& stim, double dt, int n_steps,
                         std::span<const Vec2> probes, std::span<const int> snapshot_steps,
                         const StepOptions& opts) {
    if (n_steps > 0 && !(dt > 0.0)) {
        throw std::invalid_argument("monodomain_run: dt must be positive");
    }
    p.validate();

    const SparseSymMatrix M = assemble_mass(mesh);
    const SparseSymMatrix A = stiffness_or_zero(mesh, field);
    const StepSystem sys =
        n_steps > 0 ? make_step_system(M, A, p.c_m, dt, opts.mass_lumping) : StepSystem{};

    RunResult result;
    result.probes.points.assign(probes.begin(), probes.end());
    result.probes.node_indices = resolve_probes(mesh, probes);
    result.probes.values.resize(probes.size());
    result.snapshots.steps.assign(snapshot_steps.begin(), snapshot_steps.end());
    result.snapshots.v.resize(snapshot_steps.size());

    MonodomainState state = init_state(mesh, ic, p, opts.check_gate_bounds);

    auto record = [&](const MonodomainState& s) {
        result.probes.times.push_back(s.t);
        for (std::size_t k = 0; k < result.probes.node_indices.size(); ++k) {
            result.probes.values[k].push_back(
                s.v[static_cast<std::size_t>(result.probes.node_indices[k])]);
        }
        for (std::size_t k = 0; k < result.snapshots.steps.size(); ++k) {
            if (result.snapshots.steps[k] == s.step_index) result.snapshots.v[k] = s.v;
        }
        for (double w : s.w) {
            result.min_w_seen = std::min(result.min_w_seen, w);
            result.max_w_seen = std::max(result.max_w_seen, w);
        }
        for (double v : s.v) result.min_tau_w_seen = std::min(result.min_tau_w_seen, tau_w(v, p));
    };

    record(state);
    for (int k = 0; k < n_steps; ++k) {
        state = step_with_system(state, dt, sys, p, mesh, stim, opts);
        record(state);
    }
    result.final_state = std::move(state);
    return result;
}

}  // namespace cardio
