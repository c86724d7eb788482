#include "cardio/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cardio/solver.hpp"

namespace cardio {

std::vector<double> dense_symmetric_eigenvalues(std::vector<double> a, int n, double tol,
                                                int max_sweeps) {
    if (static_cast<int>(a.size()) != n * n) {
        throw std::invalid_argument("dense_symmetric_eigenvalues: size mismatch");
    }
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };

    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return std::vector<double>(static_cast<std::size_t>(n), 0.0);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off = std::max(off, std::abs(at(i, j)));
        if (off <= tol * scale) break;

        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    std::vector<double> eigs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) eigs[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

std::vector<double> to_dense(const SparseSymMatrix& m) {
    std::vector<double> a(static_cast<std::size_t>(m.dim()) * m.dim(), 0.0);
    m.for_each([&](int i, int j, double v) { a[static_cast<std::size_t>(i) * m.dim() + j] = v; });
    return a;
}

double smallest_eigenvalue_inverse_power(const SparseSymMatrix& m, int iterations,
                                         double cg_tol) {
    const int n = m.dim();
    std::vector<double> x(static_cast<std::size_t>(n));
    // fixed deterministic seed vector
    unsigned long long state = 0x9e3779b97f4a7c15ull;
    for (double& v : x) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        v = static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5;
    }
    SolveOptions opts;
    opts.tol = cg_tol;
    opts.max_iter = 100 * n;
    double rayleigh = 0.0;
    for (int it = 0; it < iterations; ++it) {
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : x) v /= nrm;
        std::vector<double> y = solve_spd(m, x, opts);
        std::vector<double> my = m.multiply(y);
        double yy = 0.0, ymy = 0.0;
        for (int i = 0; i < n; ++i) {
            yy += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
            ymy += y[static_cast<std::size_t>(i)] * my[static_cast<std::size_t>(i)];
        }
        rayleigh = ymy / yy;
        x = std::move(y);
    }
    return rayleigh;
}

}  // namespace cardio
