#pragma once

#include <optional>

namespace cardio {

// Sign convention for the ionic current. "paper" returns the current whose
// negative equals (1/C_m)(g_Ca m_inf (v-v_Ca) + g_K w (v-v_K) + g_L (v-v_L));
// under it the w=0 nullcline crossing near v = 1.96 mV is attracting.
// "standard" flips the sign (the usual Morris-Lecar orientation with a
// stable rest near -49.5 mV). The zero set is identical.
enum class SignConvention { paper, standard };

struct MorrisLecarParams {
    double v1 = -1.2;    // mV, half-activation of m_inf
    double v2 = 18.0;    // mV, reciprocal slope of m_inf
    double v3 = -1.0;    // mV, half-activation of w_inf
    double v4 = 14.5;    // mV, reciprocal slope of w_inf
    double v_ca = 120.0; // mV
    double v_k = -70.0;  // mV
    double v_l = -50.0;  // mV
    double g_ca = 3.0;   // mS/cm^2
    double g_k = 8.0;    // mS/cm^2
    double g_l = 4.0;    // mS/cm^2
    double phi = 0.005;  // 1/ms, gating rate scale
    double c_m = 1.0;    // uF/cm^2
    SignConvention sign_convention = SignConvention::paper;

    void validate() const;  // v2,v4 > 0; conductances >= 0; c_m > 0; phi >= 0
};

double m_inf(double v, const MorrisLecarParams& p);
double w_inf(double v, const MorrisLecarParams& p);
double tau_w(double v, const MorrisLecarParams& p);  // in (0,1], peak 1 at v3

// Ionic current density under the configured sign convention.
double i_ion(double v, double w, const MorrisLecarParams& p);

// Relaxation rate of the gate: phi * (w_inf(v) - w) / tau_w(v), so that
// dw/dt = gating_rate drives w toward w_inf. Zero exactly at w = w_inf(v).
double gating_rate(double v, double w, const MorrisLecarParams& p);

// Exact exponential (Rush-Larsen) update of the gate over dt at frozen v:
// w_inf + (w - w_inf) * exp(-phi*dt/tau_w). Preserves [0,1] unconditionally.
double step_gating(double v, double w, double dt, const MorrisLecarParams& p);

struct RestState {
    double v = 0.0;
    double residual = 0.0;
};

// Root of the current balance g_Ca m_inf(v)(v-v_Ca) + g_K w (v-v_K) +
// g_L (v-v_L) with w = w_inf(v) (full equilibrium) or w frozen at the given
// value (v-nullcline crossing). Bracket scan over [-120, 150] mV followed by
// bisection; when several roots exist the positive-to-negative crossing is
// returned (the one the simulated voltage settles on under the paper
// convention), otherwise the first root. Throws if no sign change is found.
RestState rest_state(const MorrisLecarParams& p, std::optional<double> w_frozen = {});

}  // namespace cardio
