#pragma once

#include <vector>

#include "cardio/sparse.hpp"

namespace cardio {

// All eigenvalues of a dense symmetric matrix (row-major n*n), ascending.
// Cyclic Jacobi rotations; intended for small verification problems.
std::vector<double> dense_symmetric_eigenvalues(std::vector<double> a, int n,
                                                double tol = 1e-13, int max_sweeps = 100);

std::vector<double> to_dense(const SparseSymMatrix& m);

// Smallest eigenvalue estimate by inverse power iteration (CG inner solves).
double smallest_eigenvalue_inverse_power(const SparseSymMatrix& m, int iterations = 50,
                                         double cg_tol = 1e-12);

}  // namespace cardio
