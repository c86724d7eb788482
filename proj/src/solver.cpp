#include "cardio/solver.hpp"

#include <cmath>

namespace cardio {

namespace {

double dot_product(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
    return acc;
}

void remove_mean(std::span<double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double& v : x) v -= mean;
}

}  // namespace

std::vector<double> solve_spd(const SparseSymMatrix& A, std::span<const double> b,
                              const SolveOptions& opts, SolveReport* report) {
    const int n = A.dim();
    if (static_cast<int>(b.size()) != n) {
        throw std::invalid_argument("solve_spd: rhs size mismatch");
    }
    const int max_iter = opts.max_iter > 0 ? opts.max_iter : 10 * n;

    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::vector<double> r(b.begin(), b.end());

    const double b_norm = std::sqrt(dot_product(r, r));
    if (opts.deflate_constant) {
        double mean = 0.0;
        for (double v : r) mean += v;
        mean /= static_cast<double>(n);
        if (std::abs(mean) * static_cast<double>(n) > 1e-8 * (1.0 + b_norm)) {
            throw std::invalid_argument(
                "solve_spd: rhs has nonzero mean against the constant null space (sum " +
                std::to_string(mean * n) + ")");
        }
        remove_mean(r);
    }
    if (b_norm == 0.0) {
        if (report) *report = {0, 0.0};
        return x;
    }

    // Jacobi preconditioner; guard zero diagonals (structurally empty rows)
    std::vector<double> inv_diag = A.diagonal();
    for (double& d : inv_diag) d = (d != 0.0) ? 1.0 / d : 1.0;

    std::vector<double> z(static_cast<std::size_t>(n));
    std::vector<double> p(static_cast<std::size_t>(n));
    std::vector<double> Ap(static_cast<std::size_t>(n));

    for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = inv_diag[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
    if (opts.deflate_constant) remove_mean(z);
    p = z;
    double rz = dot_product(r, z);

    double res_norm = std::sqrt(dot_product(r, r));
    int iter = 0;
    while (res_norm / b_norm > opts.tol && iter < max_iter) {
        A.multiply(p, Ap);
        const double pAp = dot_product(p, Ap);
        if (!(pAp > 0.0)) {
            throw SolveError("solve_spd: encountered non-positive curvature (matrix not SPD "
                             "on the solve subspace)",
                             res_norm / b_norm);
        }
        const double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] += alpha * p[static_cast<std::size_t>(i)];
            r[static_cast<std::size_t>(i)] -= alpha * Ap[static_cast<std::size_t>(i)];
        }
        if (opts.deflate_constant) remove_mean(r);
        for (int i = 0; i < n; ++i) z[static_cast<std::size_t>(i)] = inv_diag[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(i)];
        if (opts.deflate_constant) remove_mean(z);
        const double rz_next = dot_product(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = z[static_cast<std::size_t>(i)] + beta * p[static_cast<std::size_t>(i)];
        res_norm = std::sqrt(dot_product(r, r));
        ++iter;
    }

    if (res_norm / b_norm > opts.tol) {
        throw SolveError("solve_spd: no convergence within " + std::to_string(max_iter) +
                             " iterations, final relative residual " +
                             std::to_string(res_norm / b_norm),
                         res_norm / b_norm);
    }
    if (opts.deflate_constant) remove_mean(x);
    if (report) *report = {iter, res_norm / b_norm};
    return x;
}

}  // namespace cardio
