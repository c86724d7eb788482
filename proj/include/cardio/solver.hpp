#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cardio/sparse.hpp"

namespace cardio {

struct SolveOptions {
    double tol = 1e-10;      // relative residual target
    int max_iter = 0;        // 0 -> 10 * dim
    bool deflate_constant = false;  // project out the all-ones null space
};

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0.0;
};

class SolveError : public std::runtime_error {
  public:
    SolveError(const std::string& what, double residual)
        : std::runtime_error(what), final_residual(residual) {}
    double final_residual;
};

// Preconditioned (Jacobi) conjugate gradients for SPD systems. With
// deflate_constant the system may be positive semidefinite with the
// constant vector spanning the null space; b must then have zero mean
// against that null space and the returned solution has zero mean.
// Deterministic: fixed iteration order, no data races.
std::vector<double> solve_spd(const SparseSymMatrix& A, std::span<const double> b,
                              const SolveOptions& opts = {}, SolveReport* report = nullptr);

}  // namespace cardio
