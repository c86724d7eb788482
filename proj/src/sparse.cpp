#include "cardio/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cardio {

SparseSymMatrix::Builder::Builder(int dim) : dim_(dim), rows_(static_cast<std::size_t>(dim)) {
    if (dim < 0) throw std::invalid_argument("SparseSymMatrix: negative dimension");
}

void SparseSymMatrix::Builder::add(int i, int j, double value) {
    if (i < 0 || i >= dim_ || j < 0 || j >= dim_) {
        throw std::out_of_range("SparseSymMatrix::Builder::add: index (" + std::to_string(i) +
                                ", " + std::to_string(j) + ") out of range for dim " +
                                std::to_string(dim_));
    }
    rows_[static_cast<std::size_t>(i)].emplace_back(j, value);
}

SparseSymMatrix SparseSymMatrix::Builder::finalize() {
    SparseSymMatrix m;
    m.dim_ = dim_;
    m.row_start_.assign(static_cast<std::size_t>(dim_) + 1, 0);
    for (auto& row : rows_) {
        // stable so duplicate (i,j) contributions sum in insertion order;
        // mirrored element matrices then assemble to a bitwise-symmetric sum
        std::stable_sort(row.begin(), row.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    for (int i = 0; i < dim_; ++i) {
        auto& row = rows_[static_cast<std::size_t>(i)];
        std::size_t out = 0;
        std::size_t k = 0;
        while (k < row.size()) {
            const int j = row[k].first;
            double sum = 0.0;
            while (k < row.size() && row[k].first == j) sum += row[k++].second;
            if (sum != 0.0) row[out++] = {j, sum};
        }
        row.resize(out);
        m.row_start_[static_cast<std::size_t>(i) + 1] =
            m.row_start_[static_cast<std::size_t>(i)] + static_cast<int>(out);
    }
    m.col_.reserve(static_cast<std::size_t>(m.row_start_.back()));
    m.values_.reserve(static_cast<std::size_t>(m.row_start_.back()));
    for (auto& row : rows_) {
        for (auto& [j, v] : row) {
            m.col_.push_back(j);
            m.values_.push_back(v);
        }
    }
    return m;
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (static_cast<int>(x.size()) != dim_ || static_cast<int>(y.size()) != dim_) {
        throw std::invalid_argument("SparseSymMatrix::multiply: size mismatch");
    }
    for (int i = 0; i < dim_; ++i) {
        double acc = 0.0;
        for (int k = row_start_[static_cast<std::size_t>(i)];
             k < row_start_[static_cast<std::size_t>(i) + 1]; ++k) {
            acc += values_[static_cast<std::size_t>(k)] *
                   x[static_cast<std::size_t>(col_[static_cast<std::size_t>(k)])];
        }
        y[static_cast<std::size_t>(i)] = acc;
    }
}

std::vector<double> SparseSymMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(dim_));
    multiply(x, y);
    return y;
}

double SparseSymMatrix::entry(int i, int j) const {
    if (i < 0 || i >= dim_ || j < 0 || j >= dim_) {
        throw std::out_of_range("SparseSymMatrix::entry: index out of range");
    }
    for (int k = row_start_[static_cast<std::size_t>(i)];
         k < row_start_[static_cast<std::size_t>(i) + 1]; ++k) {
        if (col_[static_cast<std::size_t>(k)] == j) return values_[static_cast<std::size_t>(k)];
    }
    return 0.0;
}

std::vector<double> SparseSymMatrix::diagonal() const {
    std::vector<double> d(static_cast<std::size_t>(dim_), 0.0);
    for (int i = 0; i < dim_; ++i) d[static_cast<std::size_t>(i)] = entry(i, i);
    return d;
}

std::vector<double> SparseSymMatrix::row_sums() const {
    std::vector<double> s(static_cast<std::size_t>(dim_), 0.0);
    for (int i = 0; i < dim_; ++i) {
        double acc = 0.0;
        for (int k = row_start_[static_cast<std::size_t>(i)];
             k < row_start_[static_cast<std::size_t>(i) + 1]; ++k) {
            acc += values_[static_cast<std::size_t>(k)];
        }
        s[static_cast<std::size_t>(i)] = acc;
    }
    return s;
}

double SparseSymMatrix::symmetry_defect() const {
    double max_entry = 0.0;
    for (double v : values_) max_entry = std::max(max_entry, std::abs(v));
    if (max_entry == 0.0) return 0.0;
    double defect = 0.0;
    for (int i = 0; i < dim_; ++i) {
        for (int k = row_start_[static_cast<std::size_t>(i)];
             k < row_start_[static_cast<std::size_t>(i) + 1]; ++k) {
            const int j = col_[static_cast<std::size_t>(k)];
            defect = std::max(defect,
                              std::abs(values_[static_cast<std::size_t>(k)] - entry(j, i)));
        }
    }
    return defect / max_entry;
}

double SparseSymMatrix::gershgorin_lower() const {
    double lo = 0.0;
    bool first = true;
    for (int i = 0; i < dim_; ++i) {
        double diag = 0.0;
        double off = 0.0;
        for (int k = row_start_[static_cast<std::size_t>(i)];
             k < row_start_[static_cast<std::size_t>(i) + 1]; ++k) {
            if (col_[static_cast<std::size_t>(k)] == i) {
                diag = values_[static_cast<std::size_t>(k)];
            } else {
                off += std::abs(values_[static_cast<std::size_t>(k)]);
            }
        }
        const double bound = diag - off;
        if (first || bound < lo) lo = bound;
        first = false;
    }
    return lo;
}

double SparseSymMatrix::gershgorin_upper() const {
    double hi = 0.0;
    bool first = true;
    for (int i = 0; i < dim_; ++i) {
        double diag = 0.0;
        double off = 0.0;
        for (int k = row_start_[static_cast<std::size_t>(i)];
             k < row_start_[static_cast<std::size_t>(i) + 1]; ++k) {
            if (col_[static_cast<std::size_t>(k)] == i) {
                diag = values_[static_cast<std::size_t>(k)];
            } else {
                off += std::abs(values_[static_cast<std::size_t>(k)]);
            }
        }
        const double bound = diag + off;
        if (first || bound > hi) hi = bound;
        first = false;
    }
    return hi;
}

void SparseSymMatrix::write_matrix_market(std::ostream& os) const {
    os << "%%MatrixMarket matrix coordinate real symmetric\n";
    int count = 0;
    for (int i = 0; i < dim_; ++i) {
        for (int k = row_start_[static_cast<std::size_t>(i)];
             k < row_start_[static_cast<std::size_t>(i) + 1]; ++k) {
            if (col_[static_cast<std::size_t>(k)] <= i) ++count;
        }
    }
    os << dim_ << " " << dim_ << " " << count << "\n";
    char buf[64];
    for (int i = 0; i < dim_; ++i) {
        for (int k = row_start_[static_cast<std::size_t>(i)];
             k < row_start_[static_cast<std::size_t>(i) + 1]; ++k) {
            const int j = col_[static_cast<std::size_t>(k)];
            if (j > i) continue;
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1, j + 1,
                          values_[static_cast<std::size_t>(k)]);
            os << buf;
        }
    }
}

SparseSymMatrix sparse_sum(const SparseSymMatrix& a, const SparseSymMatrix& b, double scale_a,
                           double scale_b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("sparse_sum: dimension mismatch");
    }
    SparseSymMatrix::Builder builder(a.dim());
    a.for_each([&](int i, int j, double v) { builder.add(i, j, scale_a * v); });
    b.for_each([&](int i, int j, double v) { builder.add(i, j, scale_b * v); });
    return builder.finalize();
}

SparseSymMatrix sparse_zero(int dim) { return SparseSymMatrix::Builder(dim).finalize(); }

}  // namespace cardio
