#include "cardio/ionic.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace cardio {

void MorrisLecarParams::validate() const {
    if (!(v2 > 0.0) || !(v4 > 0.0)) {
        throw std::invalid_argument("MorrisLecarParams: v2 and v4 must be positive");
    }
    if (g_ca < 0.0 || g_k < 0.0 || g_l < 0.0) {
        throw std::invalid_argument("MorrisLecarParams: conductances must be >= 0");
    }
    if (!(c_m > 0.0)) {
        throw std::invalid_argument("MorrisLecarParams: c_m must be positive");
    }
    if (phi < 0.0) {
        throw std::invalid_argument("MorrisLecarParams: phi must be >= 0");
    }
}

double m_inf(double v, const MorrisLecarParams& p) {
    return 0.5 * (1.0 + std::tanh((v - p.v1) / p.v2));
}

double w_inf(double v, const MorrisLecarParams& p) {
    return 0.5 * (1.0 + std::tanh((v - p.v3) / p.v4));
}

double tau_w(double v, const MorrisLecarParams& p) {
    return 1.0 / std::cosh((v - p.v3) / (2.0 * p.v4));
}

namespace {

// the bracketed conductance sum of the current balance
double current_sum(double v, double w, const MorrisLecarParams& p) {
    return p.g_ca * m_inf(v, p) * (v - p.v_ca) + p.g_k * w * (v - p.v_k) +
           p.g_l * (v - p.v_l);
}

}  // namespace

double i_ion(double v, double w, const MorrisLecarParams& p) {
    const double s = current_sum(v, w, p) / p.c_m;
    return p.sign_convention == SignConvention::paper ? -s : s;
}

double gating_rate(double v, double w, const MorrisLecarParams& p) {
    return p.phi * (w_inf(v, p) - w) / tau_w(v, p);
}

double step_gating(double v, double w, double dt, const MorrisLecarParams& p) {
    if (dt < 0.0) throw std::invalid_argument("step_gating: dt must be >= 0");
    const double wi = w_inf(v, p);
    return wi + (w - wi) * std::exp(-p.phi * dt / tau_w(v, p));
}

namespace {

double bisect(const std::function<double(double)>& f, double a, double b, double fa) {
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) != (fm < 0.0)) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
        if (b - a < 1e-14 * std::max(1.0, std::abs(m))) break;
    }
    return 0.5 * (a + b);
}

}  // namespace

RestState rest_state(const MorrisLecarParams& p, std::optional<double> w_frozen) {
    auto f = [&](double v) {
        const double w = w_frozen ? *w_frozen : w_inf(v, p);
        return current_sum(v, w, p);
    };

    constexpr double scan_lo = -120.0;
    constexpr double scan_hi = 150.0;
    constexpr int scan_steps = 2700;  // 0.1 mV resolution
    const double dv = (scan_hi - scan_lo) / scan_steps;

    // Collect all bracketed roots; prefer a positive-to-negative crossing
    // (the one locally attracting for dv/dt under the paper convention, which
    // is the steady state the simulated probes settle on). Fall back to the
    // first root if no such crossing exists, e.g. the full equilibrium.
    std::optional<double> attracting_root;
    std::optional<double> first_root;
    bool any_nonzero = false;
    double a = scan_lo;
    double fa = f(a);
    for (int k = 1; k <= scan_steps && !attracting_root; ++k) {
        const double b = scan_lo + k * dv;
        const double fb = f(b);
        any_nonzero = any_nonzero || fa != 0.0 || fb != 0.0;
        if (fa == 0.0) {
            if (!first_root) first_root = a;
        } else if ((fa < 0.0) != (fb < 0.0)) {
            const double root = bisect(f, a, b, fa);
            if (!first_root) first_root = root;
            if (fa > 0.0) attracting_root = root;
        }
        a = b;
        fa = fb;
    }
    if (fa == 0.0 && !first_root) first_root = a;

    const std::optional<double> chosen = attracting_root ? attracting_root : first_root;
    if (!chosen || !any_nonzero) {
        throw std::runtime_error(
            "rest_state: no sign change of the current balance in [-120, 150] mV");
    }
    return {*chosen, std::abs(f(*chosen))};
}

}  // namespace cardio
