// Acceptance suite: one pass/fail line per criterion, exit code equals the
// number of failures. Thresholds are fixed here, not configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "cardio/bidomain.hpp"
#include "cardio/config.hpp"
#include "cardio/eigen.hpp"
#include "cardio/experiments.hpp"
#include "cardio/io.hpp"
#include "oracles.hpp"

using namespace cardio;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %-18s %s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

// 1. grids n = 10/20/40 over [-1.25,1.25]^2 give exactly 121/441/1681 dofs
//    and 200/800/3200 triangles, in under a second
void criterion_mesh_fidelity() {
    const auto t0 = std::chrono::steady_clock::now();
    const int ns[3] = {10, 20, 40};
    const int dofs[3] = {121, 441, 1681};
    const int elements[3] = {200, 800, 3200};
    bool ok = true;
    for (int k = 0; k < 3; ++k) {
        const Mesh mesh = build_structured_mesh(-1.25, 1.25, ns[k]);
        ok = ok && mesh.node_count() == dofs[k] && mesh.triangle_count() == elements[k];
    }
    const double elapsed = seconds_since(t0);
    ok = ok && elapsed < 1.0;
    report(1, "mesh fidelity",
           ok, fmt("dofs 121/441/1681, elements 200/800/3200, %.3f s", elapsed));
}

// 2. default config: the (0,0) probe differs by < 2% of the dynamic range
//    between the 441- and 1681-dof runs, and strictly less than 121->441;
//    the 0.5% reference variation is reported, not gated on
void criterion_grid_validation() {
    const auto t0 = std::chrono::steady_clock::now();
    SimConfig cfg;
    cfg.validate();
    OutputOptions out;
    out.timestamps = false;
    out.out_dir = std::filesystem::temp_directory_path() / "cardio_acceptance_grid";
    const GridValidationResult r = experiment_grid_validation(cfg, out);
    const double elapsed = seconds_since(t0);
    const bool ok = r.diff_mid_fine < 0.02 && r.diff_mid_fine < r.diff_coarse_mid &&
                    elapsed < 120.0;
    report(2, "grid validation", ok,
           fmt("441->1681 %.3e (gate 2e-2), 121->441 %.3e, 0.5%% reference: %s, %.1f s",
               r.diff_mid_fine, r.diff_coarse_mid,
               r.within_half_percent ? "met" : "missed", elapsed));
}

// 3. phi = 0, w0 = 0, paper convention: all five probes within 1% of the
//    w-frozen nullcline rest state by step 350 of dt = 0.1
void criterion_plateau() {
    SimConfig cfg;  // defaults are exactly this setup
    cfg.validate();
    const Mesh mesh = build_structured_mesh(cfg.domain_a, cfg.domain_b, cfg.grid_n);
    const RunResult run = monodomain_run(mesh, cfg.params(), cfg.field(), cfg.ic, {}, cfg.dt,
                                         cfg.n_steps, cfg.probes, {}, cfg.step_options());
    const double v_star = rest_state(cfg.params(), 0.0).v;
    bool ok = std::abs(v_star - 1.96) < 0.01;  // the v ~ 2 mV plateau level
    double worst = 0.0;
    for (const auto& trace : run.probes.values) {
        const auto [lo, hi] = std::minmax_element(trace.begin(), trace.end());
        const double range = *hi - *lo;
        const double rel = std::abs(trace[350] - v_star) / range;
        worst = std::max(worst, rel);
        ok = ok && rel < 0.01;
    }
    report(3, "plateau value", ok,
           fmt("v* = %.4f mV, worst probe deviation %.2e of range (gate 1e-2)", v_star,
               worst));
}

// 4. min-max spread of v at step 399 under 1% of the initial spread
void criterion_isochrone_collapse() {
    SimConfig cfg;
    cfg.validate();
    OutputOptions out;
    out.timestamps = false;
    out.out_dir = std::filesystem::temp_directory_path() / "cardio_acceptance_iso";
    const IsochroneResult r = experiment_isochrones(cfg, out);
    const double ratio = r.final_spread / r.initial_spread;
    const bool ok = r.steps.back() == 399 && ratio < 0.01;
    report(4, "isochrone collapse", ok,
           fmt("spread %.3g -> %.3g mV, ratio %.2e (gate 1e-2)", r.initial_spread,
               r.final_spread, ratio));
}

// 5. gating bounds with w0 = r = 0.3, checked at every step over 40 ms.
//    A w = 0.3 run only completes under the standard convention (the paper
//    convention has no attractor anywhere on that gate level), so both cases
//    use it: (a) frozen gate, where the bound r exp(0) = r must hold exactly,
//    and (b) the active gate, where r exp(-T phi / tau_min) <= w <= 1.
void criterion_gating_bounds() {
    SimConfig base;
    base.ic.w0 = 0.3;
    base.grid_n = 10;
    base.sign_convention = SignConvention::standard;
    base.validate();
    const Mesh mesh = build_structured_mesh(base.domain_a, base.domain_b, base.grid_n);
    const RunResult frozen = monodomain_run(mesh, base.params(), base.field(), base.ic, {},
                                            base.dt, base.n_steps, {}, {},
                                            base.step_options());
    const bool frozen_ok = frozen.min_w_seen >= 0.3 && frozen.max_w_seen <= 1.0;

    SimConfig active = base;
    active.phi = 0.005;
    active.validate();
    const RunResult run = monodomain_run(mesh, active.params(), active.field(), active.ic,
                                         {}, active.dt, active.n_steps, {}, {},
                                         active.step_options());
    const double t_final = active.dt * active.n_steps;
    const double bound = 0.3 * std::exp(-t_final * active.phi / run.min_tau_w_seen);
    const bool active_ok = run.min_w_seen >= bound && run.max_w_seen <= 1.0;

    report(5, "gating bounds", frozen_ok && active_ok,
           fmt("frozen min %.3f (>= 0.3); active min %.4f >= bound %.4f, max %.4f <= 1",
               frozen.min_w_seen, run.min_w_seen, bound, run.max_w_seen));
}

// 6. mass matrix SPD: dense eigensolve on n=5; Gershgorin plus CG-based
//    (inverse power) bounds on the three grid systems
void criterion_mass_spd() {
    const Mesh small = build_structured_mesh(-1.25, 1.25, 5);
    const SparseSymMatrix m5 = assemble_mass(small);
    const std::vector<double> eigs = dense_symmetric_eigenvalues(to_dense(m5), m5.dim());
    bool ok = eigs.front() > 0.0;
    double worst_power = eigs.front();
    for (int n : {10, 20, 40}) {
        const Mesh mesh = build_structured_mesh(-1.25, 1.25, n);
        const SparseSymMatrix m = assemble_mass(mesh);
        ok = ok && m.gershgorin_lower() >= -1e-15;  // no negative disc
        const double lambda_min = smallest_eigenvalue_inverse_power(m, 25);
        worst_power = std::min(worst_power, lambda_min);
        ok = ok && lambda_min > 0.0;
    }
    report(6, "mass matrix SPD", ok,
           fmt("dense lambda_min(n=5) %.3e, smallest CG estimate %.3e (gate > 0)",
               eigs.front(), worst_power));
}

// 7. bidomain -> monodomain reduction, lambda in {1, 3}, n=10, 100 steps,
//    max deviation < 1e-6, under 30 s
void criterion_reduction() {
    const auto t0 = std::chrono::steady_clock::now();
    SimConfig cfg;
    cfg.grid_n = 10;
    cfg.validate();
    const Mesh mesh = build_structured_mesh(cfg.domain_a, cfg.domain_b, cfg.grid_n);
    const double dev1 =
        reduction_check(mesh, cfg.params(), cfg.field(), 1.0, cfg.ic, cfg.dt, 100,
                        cfg.step_options());
    const double dev3 =
        reduction_check(mesh, cfg.params(), cfg.field(), 3.0, cfg.ic, cfg.dt, 100,
                        cfg.step_options());
    const double elapsed = seconds_since(t0);
    const bool ok = dev1 < 1e-6 && dev3 < 1e-6 && elapsed < 30.0;
    report(7, "bidomain reduction", ok,
           fmt("deviation lambda=1: %.2e, lambda=3: %.2e (gate 1e-6), %.1f s", dev1, dev3,
               elapsed));
}

// 8. stability estimate: response d(delta)/delta agrees within a factor of 2
//    across delta = 1e-2/1e-3/1e-4 at T = 20 ms and d decreases with delta
void criterion_stability() {
    SimConfig cfg;
    cfg.grid_n = 10;
    cfg.phi = 0.005;
    cfg.sign_convention = SignConvention::standard;
    cfg.ic.w0 = 0.3;
    cfg.validate();
    const Mesh mesh = build_structured_mesh(cfg.domain_a, cfg.domain_b, cfg.grid_n);
    const MorrisLecarParams p = cfg.params();
    const SparseSymMatrix M = assemble_mass(mesh);
    const SparseSymMatrix A = assemble_stiffness(mesh, cfg.field());
    const int n_steps = 200;  // 20 ms

    std::vector<double> eta(static_cast<std::size_t>(mesh.node_count()));
    oracle::Lcg rng(99);
    double nrm = 0.0;
    for (double& x : eta) {
        x = rng.next();
        nrm += x * x;
    }
    nrm = std::sqrt(nrm / static_cast<double>(eta.size()));
    for (double& x : eta) x /= nrm;

    auto run_from = [&](double delta) {
        MonodomainState s = init_state(mesh, cfg.ic, p);
        for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] += delta * eta[i];
        for (int k = 0; k < n_steps; ++k) {
            s = monodomain_step(s, cfg.dt, M, A, p, mesh, {}, cfg.step_options());
        }
        return s;
    };
    const MonodomainState base = run_from(0.0);
    std::vector<double> d;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        const MonodomainState s = run_from(delta);
        double dv = 0.0, dw = 0.0;
        for (std::size_t i = 0; i < s.v.size(); ++i) {
            dv += (s.v[i] - base.v[i]) * (s.v[i] - base.v[i]);
            dw += (s.w[i] - base.w[i]) * (s.w[i] - base.w[i]);
        }
        const double inv_n = 1.0 / static_cast<double>(s.v.size());
        d.push_back(std::sqrt(dv * inv_n) + std::sqrt(dw * inv_n));
    }
    const double r1 = d[0] / 1e-2, r2 = d[1] / 1e-3, r3 = d[2] / 1e-4;
    const double spread = std::max({r1, r2, r3}) / std::min({r1, r2, r3});
    const bool ok = spread < 2.0 && d[0] > d[1] && d[1] > d[2];
    report(8, "stability estimate", ok,
           fmt("d/delta = %.4f / %.4f / %.4f, spread %.3f (gate 2), d decreasing: %s", r1,
               r2, r3, spread, (d[0] > d[1] && d[1] > d[2]) ? "yes" : "no"));
}

// 9. sigma = 0 run matches the adaptive high-order ODE oracle to a relative
//    error below 1e-3 over 40 ms
void criterion_single_cell() {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 1);
    MorrisLecarParams p;
    p.sign_convention = SignConvention::standard;
    p.phi = 0.005;
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::constant;
    ic.v0 = -30.0;
    ic.w0 = 0.3;
    ConductivityField zero;
    zero.sigma_l = 0.0;
    zero.sigma_t = 0.0;
    const double dt = 2.5e-4;
    const int n_steps = static_cast<int>(std::lround(40.0 / dt));
    StepOptions opts;
    opts.solver_tol = 1e-12;
    const std::vector<Vec2> probes{{-1.25, -1.25}};
    const RunResult run =
        monodomain_run(mesh, p, zero, ic, {}, dt, n_steps, probes, {}, opts);

    const std::vector<double>& trace = run.probes.values[0];
    const auto [lo, hi] = std::minmax_element(trace.begin(), trace.end());
    const double range = *hi - *lo;
    const oracle::MlConstants c;
    oracle::State2 y{-30.0L, 0.3L};
    long double t = 0.0L;
    double worst = 0.0;
    const int stride = n_steps / 400;  // every 0.1 ms, resolving the fast transient
    for (int k = stride; k <= n_steps; k += stride) {
        const long double t_next = static_cast<long double>(k) * dt;
        y = oracle::integrate_cell(y, t, t_next, /*paper=*/false, c);
        t = t_next;
        worst = std::max(worst, std::abs(trace[static_cast<std::size_t>(k)] -
                                         static_cast<double>(y[0])) /
                                    range);
    }
    report(9, "single-cell oracle", worst < 1e-3,
           fmt("max relative deviation %.2e over 40 ms at dt=%.1e (gate 1e-3)", worst, dt));
}

// 10. successive dt refinement shows first-order convergence
//     (difference ratios within [1.5, 2.5])
void criterion_temporal_order() {
    SimConfig cfg;
    cfg.grid_n = 4;
    cfg.phi = 0.005;
    cfg.sign_convention = SignConvention::standard;
    cfg.ic.w0 = 0.3;
    cfg.validate();
    const Mesh mesh = build_structured_mesh(cfg.domain_a, cfg.domain_b, cfg.grid_n);
    std::vector<std::vector<double>> finals;
    for (double dt : {0.2, 0.1, 0.05, 0.025}) {
        const int n_steps = static_cast<int>(std::lround(8.0 / dt));
        const RunResult run = monodomain_run(mesh, cfg.params(), cfg.field(), cfg.ic, {}, dt,
                                             n_steps, {}, {}, cfg.step_options());
        finals.push_back(run.final_state.v);
    }
    std::vector<double> diffs;
    for (std::size_t k = 0; k + 1 < finals.size(); ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < finals[k].size(); ++i) {
            const double d = finals[k][i] - finals[k + 1][i];
            acc += d * d;
        }
        diffs.push_back(std::sqrt(acc));
    }
    const double ratio1 = diffs[0] / diffs[1];
    const double ratio2 = diffs[1] / diffs[2];
    const bool ok = ratio1 > 1.5 && ratio1 < 2.5 && ratio2 > 1.5 && ratio2 < 2.5;
    report(10, "temporal order", ok,
           fmt("refinement ratios %.3f, %.3f (gate [1.5, 2.5])", ratio1, ratio2));
}

}  // namespace

int main() {
    criterion_mesh_fidelity();
    criterion_grid_validation();
    criterion_plateau();
    criterion_isochrone_collapse();
    criterion_gating_bounds();
    criterion_mass_spd();
    criterion_reduction();
    criterion_stability();
    criterion_single_cell();
    criterion_temporal_order();
    if (failures == 0) {
        std::printf("acceptance: all 10 criteria passed\n");
    } else {
        std::printf("acceptance: %d criterion(s) FAILED\n", failures);
    }
    return failures;
}
