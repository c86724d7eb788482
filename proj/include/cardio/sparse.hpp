#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace cardio {

// Compressed sparse row storage of a symmetric matrix (full pattern kept).
// Built through Builder; duplicate insertions are summed and exact zeros
// dropped at finalize. Immutable afterwards.
class SparseSymMatrix {
  public:
    SparseSymMatrix() = default;

    int dim() const { return dim_; }
    int nnz() const { return static_cast<int>(values_.size()); }

    // y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;

    double entry(int i, int j) const;  // 0 for positions outside the pattern
    std::vector<double> diagonal() const;
    std::vector<double> row_sums() const;

    // max over stored (i,j) of |a_ij - a_ji| relative to the largest entry
    double symmetry_defect() const;

    // Gershgorin disc bounds on the spectrum
    double gershgorin_lower() const;
    double gershgorin_upper() const;

    void write_matrix_market(std::ostream& os) const;

    // visit stored entries as f(i, j, value) in row-major order
    template <class F>
    void for_each(F&& f) const {
        for (int i = 0; i < dim_; ++i) {
            for (int k = row_start_[static_cast<std::size_t>(i)];
                 k < row_start_[static_cast<std::size_t>(i) + 1]; ++k) {
                f(i, col_[static_cast<std::size_t>(k)], values_[static_cast<std::size_t>(k)]);
            }
        }
    }

    class Builder {
      public:
        explicit Builder(int dim);
        void add(int i, int j, double value);
        SparseSymMatrix finalize();

      private:
        int dim_;
        std::vector<std::vector<std::pair<int, double>>> rows_;
    };

  private:
    int dim_ = 0;
    std::vector<int> row_start_;  // dim+1
    std::vector<int> col_;
    std::vector<double> values_;
};

// A + scale * B on the union pattern; both operands must have equal dim.
SparseSymMatrix sparse_sum(const SparseSymMatrix& a, const SparseSymMatrix& b,
                           double scale_a = 1.0, double scale_b = 1.0);

// dim x dim matrix with empty pattern (multiplies to zero)
SparseSymMatrix sparse_zero(int dim);

}  // namespace cardio
