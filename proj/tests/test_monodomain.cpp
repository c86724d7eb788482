#include <cmath>

#include "cardio/eigen.hpp"
#include "cardio/monodomain.hpp"
#include "cardio/solver.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cardio;

namespace {

MorrisLecarParams standard_params(double phi = 0.005) {
    MorrisLecarParams p;
    p.sign_convention = SignConvention::standard;
    p.phi = phi;
    return p;
}

ConductivityField zero_field() {
    ConductivityField f;
    f.sigma_l = 0.0;
    f.sigma_t = 0.0;
    return f;
}

double discrete_l2(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(acc / static_cast<double>(a.size()));
}

}  // namespace

TEST_CASE("initial condition presets") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 4);

    InitialCondition constant;
    constant.kind = InitialCondition::Kind::constant;
    constant.v0 = 2.0;
    constant.w0 = 0.5;
    for (double v : initial_voltage(mesh, constant)) CHECK(v == 2.0);
    MorrisLecarParams p;
    const MonodomainState s = init_state(mesh, constant, p);
    for (double w : s.w) CHECK(w == 0.5);

    InitialCondition flat_bump;
    flat_bump.kind = InitialCondition::Kind::gaussian_bump;
    flat_bump.base = -40.0;
    flat_bump.amplitude = 0.0;
    for (double v : initial_voltage(mesh, flat_bump)) CHECK(v == doctest::Approx(-40.0));

    InitialCondition ramp;
    ramp.kind = InitialCondition::Kind::linear_ramp;
    ramp.ramp_lo = -30.0;
    ramp.ramp_hi = 10.0;
    const std::vector<double> rv = initial_voltage(mesh, ramp);
    CHECK(rv[0] == doctest::Approx(-30.0));
    CHECK(rv[static_cast<std::size_t>(mesh.node_index(0, 4))] == doctest::Approx(10.0));
    CHECK(rv[static_cast<std::size_t>(mesh.node_index(0, 2))] == doctest::Approx(-10.0));
}

TEST_CASE("sharp quadrant preset resolves axis ties toward the lower-left") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 4);
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::quadrants;
    ic.smooth_width = 0.0;
    ic.q1 = 1.0;
    ic.q2 = 2.0;
    ic.q3 = 3.0;
    ic.q4 = 4.0;
    const std::vector<double> v = initial_voltage(mesh, ic);
    auto at = [&](double x, double y) {
        return v[static_cast<std::size_t>(locate_node(mesh, {x, y}, 1e-9))];
    };
    CHECK(at(0.625, 0.625) == 1.0);
    CHECK(at(-0.625, 0.625) == 2.0);
    CHECK(at(-0.625, -0.625) == 3.0);
    CHECK(at(0.625, -0.625) == 4.0);
    // axis ties: lower-left wins componentwise
    CHECK(at(0.0, 0.0) == 3.0);
    CHECK(at(0.0, 0.625) == 2.0);   // left side of the +y axis
    CHECK(at(0.625, 0.0) == 4.0);   // lower side of the +x axis
    CHECK(at(0.0, -0.625) == 3.0);
    CHECK(at(-0.625, 0.0) == 3.0);
}

TEST_CASE("smooth quadrant preset blends toward the quadrant values") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 8);
    InitialCondition ic;  // defaults: smooth, q = (1, -10, -40, -25)
    const std::vector<double> v = initial_voltage(mesh, ic);
    const double center = v[static_cast<std::size_t>(locate_node(mesh, {0.0, 0.0}, 1e-9))];
    CHECK(center == doctest::Approx(0.25 * (1.0 - 10.0 - 40.0 - 25.0)).epsilon(1e-12));
    // far corners approach the pure quadrant values
    const double q1_corner =
        v[static_cast<std::size_t>(locate_node(mesh, {1.25, 1.25}, 1e-9))];
    CHECK(std::abs(q1_corner - 1.0) < 1.5);
}

TEST_CASE("gate init from the equilibrium curve clamps at the floor") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 2);
    MorrisLecarParams p;
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::constant;
    ic.v0 = -60.0;  // w_inf(-60) ~ 8e-5, below the floor
    ic.gate = InitialCondition::GateInit::equilibrium;
    ic.w_floor = 0.01;
    const MonodomainState s = init_state(mesh, ic, p);
    for (double w : s.w) CHECK(w == 0.01);

    ic.v0 = 2.0;  // w_inf(2) ~ 0.60, above the floor
    const MonodomainState s2 = init_state(mesh, ic, p);
    for (double w : s2.w) CHECK(w == doctest::Approx(w_inf(2.0, p)).epsilon(1e-14));
}

TEST_CASE("gate bound checking rejects w0 outside (0,1]") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 2);
    MorrisLecarParams p;
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::constant;
    ic.w0 = 0.0;
    CHECK_NOTHROW(init_state(mesh, ic, p, /*enforce_gate_bounds=*/false));
    CHECK_THROWS_AS(init_state(mesh, ic, p, /*enforce_gate_bounds=*/true),
                    std::invalid_argument);
}

TEST_CASE("nothing drives the system: v is reproduced to solver precision") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 5);
    MorrisLecarParams p;
    p.g_ca = p.g_k = p.g_l = 0.0;  // I_ion identically zero
    const SparseSymMatrix M = assemble_mass(mesh);
    const SparseSymMatrix A = sparse_zero(mesh.node_count());
    InitialCondition ic;  // smooth quadrants
    MonodomainState s = init_state(mesh, ic, p);
    const std::vector<double> v0 = s.v;
    StepOptions opts;
    opts.solver_tol = 1e-13;
    s = monodomain_step(s, 0.1, M, A, p, mesh, {}, opts);
    for (std::size_t i = 0; i < v0.size(); ++i) {
        CHECK(std::abs(s.v[i] - v0[i]) < 1e-10);
    }
    CHECK(s.t == doctest::Approx(0.1));
    CHECK(s.step_index == 1);
}

TEST_CASE("spatially constant states stay spatially constant") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 6);
    const MorrisLecarParams p = standard_params();
    const SparseSymMatrix M = assemble_mass(mesh);
    ConductivityField field;  // bundled conductivities
    const SparseSymMatrix A = assemble_stiffness(mesh, field);
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::constant;
    ic.v0 = -20.0;
    ic.w0 = 0.3;
    MonodomainState s = init_state(mesh, ic, p);
    StepOptions opts;
    opts.solver_tol = 1e-12;
    for (int k = 0; k < 40; ++k) s = monodomain_step(s, 0.1, M, A, p, mesh, {}, opts);
    const auto [lo, hi] = std::minmax_element(s.v.begin(), s.v.end());
    CHECK(*hi - *lo < 1e-8);
}

TEST_CASE("single cell limit matches the adaptive ODE oracle") {
    // sigma = 0 decouples the nodes; every node follows the two-variable ODE
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 1);
    const MorrisLecarParams p = standard_params();
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::constant;
    ic.v0 = -30.0;
    ic.w0 = 0.3;
    const std::vector<Vec2> probes{{-1.25, -1.25}};
    const oracle::MlConstants c;

    auto run_and_compare = [&](double dt) {
        const int n_steps = static_cast<int>(std::lround(40.0 / dt));
        StepOptions opts;
        opts.solver_tol = 1e-12;
        const RunResult run = monodomain_run(mesh, p, zero_field(), ic, {}, dt, n_steps,
                                             probes, {}, opts);
        const std::vector<double>& trace = run.probes.values[0];
        double lo = trace[0], hi = trace[0];
        for (double v : trace) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double worst = 0.0;
        oracle::State2 y{-30.0L, 0.3L};
        long double t = 0.0L;
        const int stride = std::max(1, n_steps / 40);
        for (int k = stride; k <= n_steps; k += stride) {
            const long double t_next = static_cast<long double>(k) * dt;
            y = oracle::integrate_cell(y, t, t_next, /*paper=*/false, c);
            t = t_next;
            worst = std::max(worst, std::abs(trace[static_cast<std::size_t>(k)] -
                                             static_cast<double>(y[0])));
        }
        return worst / (hi - lo);
    };

    // first-order scheme: ~1e-2 of the range at dt = 0.01
    CHECK(run_and_compare(0.01) < 2e-2);
    // and comfortably below 1e-3 at dt = 5e-4
    CHECK(run_and_compare(5e-4) < 1e-3);
}

TEST_CASE("empty run records only the initial values") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 4);
    MorrisLecarParams p;
    p.phi = 0.0;
    InitialCondition ic;
    const std::vector<Vec2> probes{{0.0, 0.0}};
    const RunResult run = monodomain_run(mesh, p, zero_field(), ic, {}, 0.1, 0, probes, {});
    CHECK(run.probes.times.size() == 1);
    CHECK(run.probes.values[0].size() == 1);
    CHECK(run.probes.times[0] == 0.0);
}

TEST_CASE("temporal refinement shows first-order convergence") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 4);
    const MorrisLecarParams p = standard_params();
    ConductivityField field;
    InitialCondition ic;
    ic.w0 = 0.3;
    std::vector<std::vector<double>> finals;
    for (double dt : {0.2, 0.1, 0.05}) {
        const int n_steps = static_cast<int>(std::lround(8.0 / dt));
        const RunResult run = monodomain_run(mesh, p, field, ic, {}, dt, n_steps, {}, {});
        finals.push_back(run.final_state.v);
    }
    const double e1 = discrete_l2(finals[0], finals[1]);
    const double e2 = discrete_l2(finals[1], finals[2]);
    CHECK(e1 / e2 > 1.5);
    CHECK(e1 / e2 < 2.5);
}

TEST_CASE("gating bounds hold along a full run") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 8);
    const MorrisLecarParams p = standard_params();
    ConductivityField field;
    InitialCondition ic;
    ic.w0 = 0.3;
    StepOptions opts;
    opts.check_gate_bounds = true;  // runtime invariant enforcement on
    const RunResult run =
        monodomain_run(mesh, p, field, ic, {}, 0.1, 400, {}, {}, opts);
    CHECK(run.max_w_seen <= 1.0);
    const double bound = 0.3 * std::exp(-40.0 * p.phi / run.min_tau_w_seen);
    CHECK(run.min_w_seen >= bound);
}

TEST_CASE("with a frozen gate all probes settle on the nullcline rest state") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 10);
    MorrisLecarParams p;  // paper convention
    p.phi = 0.0;
    ConductivityField field;
    InitialCondition ic;  // smooth quadrants below the plateau, w0 = 0
    const std::vector<Vec2> probes{
        {0.0, 0.0}, {0.625, 0.625}, {-0.625, 0.625}, {-0.625, -0.625}, {0.625, -0.625}};
    const RunResult run = monodomain_run(mesh, p, field, ic, {}, 0.1, 400, probes, {});
    const double v_star = rest_state(p, 0.0).v;
    for (const auto& trace : run.probes.values) {
        const auto [lo, hi] = std::minmax_element(trace.begin(), trace.end());
        const double range = *hi - *lo;
        CHECK(std::abs(trace.back() - v_star) / range < 0.01);
    }
}

TEST_CASE("divergence guard aborts a paper-convention run with an active gate") {
    // with w ~ 0.3 the paper-convention dynamics has no stable branch and
    // v runs away; the guard must catch it
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 4);
    MorrisLecarParams p;
    p.phi = 0.005;
    ConductivityField field;
    InitialCondition ic;
    ic.w0 = 0.3;
    CHECK_THROWS_WITH_AS(
        (void)monodomain_run(mesh, p, field, ic, {}, 0.1, 400, {}, {}),
        doctest::Contains("divergence guard"), std::runtime_error);
}

TEST_CASE("the Backward Euler operator is SPD for any dt") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 3);
    const SparseSymMatrix M = assemble_mass(mesh);
    ConductivityField field;
    const SparseSymMatrix A = assemble_stiffness(mesh, field);
    for (double dt : {1e-3, 0.1, 10.0, 1e4}) {
        const SparseSymMatrix system = sparse_sum(M, A, 1.0, dt);
        const std::vector<double> eigs =
            dense_symmetric_eigenvalues(to_dense(system), system.dim());
        CHECK(eigs.front() > 0.0);
    }
}

TEST_CASE("perturbation response scales linearly with the perturbation") {
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 6);
    const MorrisLecarParams p = standard_params();
    ConductivityField field;
    InitialCondition ic;
    ic.w0 = 0.3;
    const SparseSymMatrix M = assemble_mass(mesh);
    const SparseSymMatrix A = assemble_stiffness(mesh, field);

    std::vector<double> eta(static_cast<std::size_t>(mesh.node_count()));
    oracle::Lcg rng(41);
    double nrm = 0.0;
    for (double& x : eta) {
        x = rng.next();
        nrm += x * x;
    }
    nrm = std::sqrt(nrm / static_cast<double>(eta.size()));
    for (double& x : eta) x /= nrm;

    auto respond = [&](double delta) {
        MonodomainState s = init_state(mesh, ic, p);
        for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] += delta * eta[i];
        for (int k = 0; k < 200; ++k) s = monodomain_step(s, 0.1, M, A, p, mesh);
        return s;
    };
    const MonodomainState base = respond(0.0);
    std::vector<double> responses;
    std::vector<double> distances;
    for (double delta : {1e-2, 1e-3, 1e-4}) {
        const MonodomainState s = respond(delta);
        const double d = discrete_l2(s.v, base.v) + discrete_l2(s.w, base.w);
        distances.push_back(d);
        responses.push_back(d / delta);
    }
    const auto [lo, hi] = std::minmax_element(responses.begin(), responses.end());
    CHECK(*hi / *lo < 2.0);                 // linear-response regime
    CHECK(distances[0] > distances[1]);     // d(delta) -> 0
    CHECK(distances[1] > distances[2]);
}

TEST_CASE("manufactured heat decay converges at second order in h") {
    // with the ionic current off, the scheme integrates the Neumann heat
    // equation; u(x,y,t) = exp(-k^2 t) cos(k (x-a)) with k = pi/(b-a) is an
    // exact solution
    const double a = -1.25, b = 1.25;
    const double k = 3.14159265358979323846 / (b - a);
    MorrisLecarParams p;
    p.g_ca = p.g_k = p.g_l = 0.0;
    p.phi = 0.0;
    ConductivityField iso;
    iso.sigma_l = 1.0;
    iso.sigma_t = 1.0;
    const double t_final = 0.2;
    const double dt = 2e-4;  // small enough that the time error is negligible
    StepOptions opts;
    opts.solver_tol = 1e-12;

    std::vector<double> errors;
    for (int n : {4, 8, 16}) {
        const Mesh mesh = build_structured_mesh(a, b, n);
        const SparseSymMatrix M = assemble_mass(mesh);
        const SparseSymMatrix A = assemble_stiffness(mesh, iso);
        const SparseSymMatrix system = sparse_sum(M, A, 1.0, dt);
        MonodomainState s;
        s.v.resize(static_cast<std::size_t>(mesh.node_count()));
        s.w.assign(s.v.size(), 0.0);
        for (int i = 0; i < mesh.node_count(); ++i) {
            s.v[static_cast<std::size_t>(i)] =
                std::cos(k * (mesh.nodes[static_cast<std::size_t>(i)].x - a));
        }
        std::vector<double> rhs(s.v.size());
        for (int step = 0; step < static_cast<int>(std::lround(t_final / dt)); ++step) {
            M.multiply(s.v, rhs);
            s.v = solve_spd(system, rhs, {1e-12, 0, false});
        }
        std::vector<double> diff(s.v.size());
        const double decay = std::exp(-k * k * t_final);
        for (int i = 0; i < mesh.node_count(); ++i) {
            diff[static_cast<std::size_t>(i)] =
                s.v[static_cast<std::size_t>(i)] -
                decay * std::cos(k * (mesh.nodes[static_cast<std::size_t>(i)].x - a));
        }
        const std::vector<double> m_diff = M.multiply(diff);
        double err = 0.0;
        for (std::size_t i = 0; i < diff.size(); ++i) err += diff[i] * m_diff[i];
        errors.push_back(std::sqrt(err));
    }
    CHECK(errors[0] / errors[1] == doctest::Approx(4.0).epsilon(0.2));
    CHECK(errors[1] / errors[2] == doctest::Approx(4.0).epsilon(0.2));
    CHECK(errors.back() < 2e-3);
}

TEST_CASE("applied current enters through the mass matrix") {
    // with sigma = 0 and all conductances zero, a constant stimulus gives
    // exact linear growth v(t) = v0 + t * i_app / C_m
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 3);
    MorrisLecarParams p;
    p.g_ca = p.g_k = p.g_l = 0.0;
    p.phi = 0.0;
    p.c_m = 2.0;
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::constant;
    ic.v0 = 1.0;
    Stimulus stim;
    stim.i_app = [](Vec2, double) { return 3.0; };
    StepOptions opts;
    opts.solver_tol = 1e-13;
    const std::vector<Vec2> probes{{0.0, 0.0}};
    const RunResult run =
        monodomain_run(mesh, p, zero_field(), ic, stim, 0.5, 10, probes, {}, opts);
    for (std::size_t k = 0; k < run.probes.times.size(); ++k) {
        const double expected = 1.0 + run.probes.times[k] * 3.0 / 2.0;
        CHECK(run.probes.values[0][k] == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("probes snap to the nearest node on coarse grids") {
    // 0.625 is not a node coordinate on the 11x11 grid; the runner snaps it
    const Mesh mesh = build_structured_mesh(-1.25, 1.25, 10);
    const std::vector<Vec2> probes{
        {0.0, 0.0}, {0.625, 0.625}, {-0.625, 0.625}, {-0.625, -0.625}, {0.625, -0.625}};
    const std::vector<int> idx = resolve_probes(mesh, probes);
    CHECK(idx[0] == mesh.node_index(5, 5));
    for (std::size_t k = 1; k < probes.size(); ++k) {
        const Vec2 node = mesh.nodes[static_cast<std::size_t>(idx[k])];
        CHECK(norm(node - probes[k]) <= mesh.spacing() * 0.71);
    }
}

TEST_CASE("lumped and consistent ionic application converge together") {
    const MorrisLecarParams p = standard_params();
    ConductivityField field;
    InitialCondition ic;
    ic.w0 = 0.3;
    auto final_diff = [&](int n) {
        const Mesh mesh = build_structured_mesh(-1.25, 1.25, n);
        StepOptions consistent;
        StepOptions lumped;
        lumped.mass_lumping = true;
        const RunResult a =
            monodomain_run(mesh, p, field, ic, {}, 0.1, 100, {}, {}, consistent);
        const RunResult b = monodomain_run(mesh, p, field, ic, {}, 0.1, 100, {}, {}, lumped);
        return discrete_l2(a.final_state.v, b.final_state.v);
    };
    const double coarse = final_diff(4);
    const double fine = final_diff(8);
    CHECK(fine < coarse);  // the two applications agree in the limit
    CHECK(fine < 0.5);
}
