#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Core>

#include "accqp/errors.hpp"

namespace accqp::linalg {

using Vector = Eigen::VectorXd;

/// One (row, col, value) entry used when assembling a matrix.
struct Triplet {
  int row;
  int col;
  double value;
};

/// Immutable compressed-sparse-column matrix.
///
/// Column pointers are nondecreasing with col_ptr.back() == nnz, and row
/// indices inside each column are strictly increasing. Duplicate entries are
/// summed at build time, so stored values are unique per coordinate.
class SparseMatrix {
public:
  SparseMatrix() = default;

  SparseMatrix(int nrows, int ncols, std::vector<int> col_ptr,
               std::vector<int> row_idx, std::vector<double> values)
      : nrows_(nrows), ncols_(ncols), col_ptr_(std::move(col_ptr)),
        row_idx_(std::move(row_idx)), values_(std::move(values)) {
    check_structure();
  }

  /// Builds from triplets; duplicates are summed.
  static SparseMatrix from_triplets(int nrows, int ncols,
                                    std::vector<Triplet> entries) {
    for (const auto& t : entries) {
      if (t.row < 0 || t.row >= nrows || t.col < 0 || t.col >= ncols)
        throw DimensionError("triplet index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return a.col != b.col ? a.col < b.col : a.row < b.row;
    });
    std::vector<int> cp(static_cast<size_t>(ncols) + 1, 0);
    std::vector<int> ri;
    std::vector<double> vx;
    ri.reserve(entries.size());
    vx.reserve(entries.size());
    for (size_t i = 0; i < entries.size();) {
      size_t j = i;
      double sum = 0.0;
      while (j < entries.size() && entries[j].row == entries[i].row &&
             entries[j].col == entries[i].col) {
        sum += entries[j].value;
        ++j;
      }
      ri.push_back(entries[i].row);
      vx.push_back(sum);
      ++cp[static_cast<size_t>(entries[i].col) + 1];
      i = j;
    }
    std::partial_sum(cp.begin(), cp.end(), cp.begin());
    return SparseMatrix(nrows, ncols, std::move(cp), std::move(ri), std::move(vx));
  }

  static SparseMatrix identity(int n, double scale = 1.0) {
    std::vector<int> cp(static_cast<size_t>(n) + 1);
    std::vector<int> ri(static_cast<size_t>(n));
    std::vector<double> vx(static_cast<size_t>(n), scale);
    for (int j = 0; j <= n; ++j) cp[static_cast<size_t>(j)] = j;
    std::iota(ri.begin(), ri.end(), 0);
    return SparseMatrix(n, n, std::move(cp), std::move(ri), std::move(vx));
  }

  int rows() const { return nrows_; }
  int cols() const { return ncols_; }
  int nnz() const { return static_cast<int>(values_.size()); }
  const std::vector<int>& col_ptr() const { return col_ptr_; }
  const std::vector<int>& row_idx() const { return row_idx_; }
  const std::vector<double>& values() const { return values_; }

  /// M * v over stored entries.
  Vector multiply(const Vector& v) const {
    if (v.size() != ncols_)
      throw DimensionError("spmv: vector length " + std::to_string(v.size()) +
                           " != ncols " + std::to_string(ncols_));
    Vector out = Vector::Zero(nrows_);
    for (int j = 0; j < ncols_; ++j) {
      const double vj = v[j];
      if (vj == 0.0) continue;
      for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
        out[row_idx_[static_cast<size_t>(p)]] += values_[static_cast<size_t>(p)] * vj;
    }
    return out;
  }

  /// M^T * v. CSC columns are rows of the transpose, so this is a dot per column.
  Vector multiply_transpose(const Vector& v) const {
    if (v.size() != nrows_)
      throw DimensionError("spmv_transpose: vector length " + std::to_string(v.size()) +
                           " != nrows " + std::to_string(nrows_));
    Vector out(ncols_);
    for (int j = 0; j < ncols_; ++j) {
      double acc = 0.0;
      for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
        acc += values_[static_cast<size_t>(p)] * v[row_idx_[static_cast<size_t>(p)]];
      out[j] = acc;
    }
    return out;
  }

  SparseMatrix transpose() const {
    std::vector<Triplet> ts;
    ts.reserve(values_.size());
    for (int j = 0; j < ncols_; ++j)
      for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
        ts.push_back({j, row_idx_[static_cast<size_t>(p)], values_[static_cast<size_t>(p)]});
    return from_triplets(ncols_, nrows_, std::move(ts));
  }

  SparseMatrix scaled(double s) const {
    SparseMatrix out = *this;
    for (double& v : out.values_) v *= s;
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Max absolute diagonal entry (square matrices).
  double max_diag() const {
    double m = 0.0;
    const int n = std::min(nrows_, ncols_);
    for (int j = 0; j < n; ++j)
      for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
        if (row_idx_[static_cast<size_t>(p)] == j) m = std::max(m, std::abs(values_[static_cast<size_t>(p)]));
    return m;
  }

  double infinity_norm() const {
    std::vector<double> row_sums(static_cast<size_t>(nrows_), 0.0);
    for (size_t p = 0; p < values_.size(); ++p)
      row_sums[static_cast<size_t>(row_idx_[p])] += std::abs(values_[p]);
    double m = 0.0;
    for (double s : row_sums) m = std::max(m, s);
    return m;
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nrows_, ncols_);
    for (int j = 0; j < ncols_; ++j)
      for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p)
        d(row_idx_[static_cast<size_t>(p)], j) = values_[static_cast<size_t>(p)];
    return d;
  }

private:
  void check_structure() const {
    if (col_ptr_.size() != static_cast<size_t>(ncols_) + 1)
      throw DimensionError("column pointer length mismatch");
    if (col_ptr_.front() != 0 || col_ptr_.back() != static_cast<int>(values_.size()))
      throw DimensionError("column pointer range mismatch");
    for (int j = 0; j < ncols_; ++j) {
      if (col_ptr_[j] > col_ptr_[j + 1]) throw DimensionError("column pointers decrease");
      for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) {
        const int r = row_idx_[static_cast<size_t>(p)];
        if (r < 0 || r >= nrows_) throw DimensionError("row index out of range");
        if (p > col_ptr_[j] && row_idx_[static_cast<size_t>(p) - 1] >= r)
          throw DimensionError("row indices not strictly increasing");
      }
    }
  }

  int nrows_ = 0;
  int ncols_ = 0;
  std::vector<int> col_ptr_{0};
  std::vector<int> row_idx_;
  std::vector<double> values_;
};

inline Vector spmv(const SparseMatrix& m, const Vector& v) { return m.multiply(v); }

inline Vector spmv_transpose(const SparseMatrix& m, const Vector& v) {
  return m.multiply_transpose(v);
}

/// A + B entrywise.
inline SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("add: shape mismatch");
  std::vector<Triplet> ts;
  ts.reserve(static_cast<size_t>(a.nnz() + b.nnz()));
  for (const SparseMatrix* m : {&a, &b})
    for (int j = 0; j < m->cols(); ++j)
      for (int p = m->col_ptr()[j]; p < m->col_ptr()[j + 1]; ++p)
        ts.push_back({m->row_idx()[static_cast<size_t>(p)], j, m->values()[static_cast<size_t>(p)]});
  return SparseMatrix::from_triplets(a.rows(), a.cols(), std::move(ts));
}

/// A * B, Gustavson column-at-a-time.
inline SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimension mismatch");
  const int m = a.rows();
  const int n = b.cols();
  std::vector<int> cp(static_cast<size_t>(n) + 1, 0);
  std::vector<int> ri;
  std::vector<double> vx;
  std::vector<double> work(static_cast<size_t>(m), 0.0);
  std::vector<int> mark(static_cast<size_t>(m), -1);
  std::vector<int> cols_hit;
  for (int j = 0; j < n; ++j) {
    cols_hit.clear();
    for (int pb = b.col_ptr()[j]; pb < b.col_ptr()[j + 1]; ++pb) {
      const int k = b.row_idx()[static_cast<size_t>(pb)];
      const double bkj = b.values()[static_cast<size_t>(pb)];
      for (int pa = a.col_ptr()[k]; pa < a.col_ptr()[k + 1]; ++pa) {
        const int i = a.row_idx()[static_cast<size_t>(pa)];
        if (mark[static_cast<size_t>(i)] != j) {
          mark[static_cast<size_t>(i)] = j;
          work[static_cast<size_t>(i)] = 0.0;
          cols_hit.push_back(i);
        }
        work[static_cast<size_t>(i)] += a.values()[static_cast<size_t>(pa)] * bkj;
      }
    }
    std::sort(cols_hit.begin(), cols_hit.end());
    for (int i : cols_hit) {
      ri.push_back(i);
      vx.push_back(work[static_cast<size_t>(i)]);
    }
    cp[static_cast<size_t>(j) + 1] = static_cast<int>(ri.size());
  }
  return SparseMatrix(m, n, std::move(cp), std::move(ri), std::move(vx));
}

/// A * A^T, the Gram matrix of the rows.
inline SparseMatrix aat(const SparseMatrix& a) { return multiply(a, a.transpose()); }

} // namespace accqp::linalg
