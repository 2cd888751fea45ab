#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include <Eigen/Core>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>

#include "accqp/errors.hpp"
#include "accqp/linalg/sparse_matrix.hpp"

namespace accqp::linalg {

/// Permuted LDL^T factorization of a symmetric positive (semi)definite matrix.
///
/// The ordering is approximate minimum degree; pivots below the static
/// regularization floor delta = 1e-12 * (1 + max |diag|) are shifted by delta
/// once, and the factorization aborts with IndefiniteMatrix if a shifted pivot
/// is still clearly negative. The object is immutable after construction and
/// solves are reentrant.
class SymmetricFactorization {
public:
  explicit SymmetricFactorization(const SparseMatrix& m) : n_(m.rows()) {
    if (m.rows() != m.cols()) throw DimensionError("factorize_spd: matrix not square");
    fingerprint_ = fingerprint_of(m);
    perm_ = amd_order(m);
    std::vector<int> pinv(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) pinv[static_cast<size_t>(perm_[static_cast<size_t>(i)])] = i;

    // Upper triangle of the permuted matrix P^T M P, i.e. Ap(i,j) = M(p[i], p[j]).
    std::vector<Triplet> upper;
    upper.reserve(static_cast<size_t>(m.nnz()) / 2 + static_cast<size_t>(n_));
    for (int j = 0; j < n_; ++j) {
      for (int p = m.col_ptr()[j]; p < m.col_ptr()[j + 1]; ++p) {
        const int i = m.row_idx()[static_cast<size_t>(p)];
        if (i > j) continue; // symmetric input, use one triangle
        int pi = pinv[static_cast<size_t>(i)];
        int pj = pinv[static_cast<size_t>(j)];
        if (pi > pj) std::swap(pi, pj);
        upper.push_back({pi, pj, m.values()[static_cast<size_t>(p)]});
      }
    }
    SparseMatrix ap = SparseMatrix::from_triplets(n_, n_, std::move(upper));

    const double delta = 1e-12 * (1.0 + m.max_diag());
    factorize_upper(ap, delta);
  }

  int dim() const { return n_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  /// Number of stored entries of L (diagnostic).
  int l_nnz() const { return l_ptr_.empty() ? 0 : l_ptr_.back(); }

  /// Solves M s = r via permuted forward/backward substitution.
  Vector solve(const Vector& r) const {
    if (r.size() != n_)
      throw DimensionError("solve_factored: rhs length " + std::to_string(r.size()) +
                           " != dimension " + std::to_string(n_));
    Vector t(n_);
    for (int i = 0; i < n_; ++i) t[i] = r[perm_[static_cast<size_t>(i)]];
    // L z = t
    for (int j = 0; j < n_; ++j) {
      const double tj = t[j];
      if (tj == 0.0) continue;
      for (int p = l_ptr_[static_cast<size_t>(j)]; p < l_ptr_[static_cast<size_t>(j) + 1]; ++p)
        t[l_row_[static_cast<size_t>(p)]] -= l_val_[static_cast<size_t>(p)] * tj;
    }
    for (int j = 0; j < n_; ++j) t[j] /= d_[static_cast<size_t>(j)];
    // L^T y = z
    for (int j = n_ - 1; j >= 0; --j) {
      double acc = t[j];
      for (int p = l_ptr_[static_cast<size_t>(j)]; p < l_ptr_[static_cast<size_t>(j) + 1]; ++p)
        acc -= l_val_[static_cast<size_t>(p)] * t[l_row_[static_cast<size_t>(p)]];
      t[j] = acc;
    }
    Vector s(n_);
    for (int i = 0; i < n_; ++i) s[perm_[static_cast<size_t>(i)]] = t[i];
    return s;
  }

  const std::vector<int>& permutation() const { return perm_; }
  const std::vector<double>& diagonal() const { return d_; }

private:
  static std::uint64_t fingerprint_of(const SparseMatrix& m) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t x) {
      h ^= x;
      h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(m.rows()));
    mix(static_cast<std::uint64_t>(m.nnz()));
    for (double v : m.values()) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      mix(bits);
    }
    return h;
  }

  std::vector<int> amd_order(const SparseMatrix& m) const {
    using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
    EigenSparse es = Eigen::Map<const EigenSparse>(m.rows(), m.cols(), m.nnz(),
                                                   m.col_ptr().data(), m.row_idx().data(),
                                                   m.values().data());
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
    amd(es, perm);
    // perm.indices()[i] is the original index eliminated at position i.
    const auto& idx = perm.indices();
    std::vector<int> p(static_cast<size_t>(n_));
    for (int i = 0; i < n_; ++i) p[static_cast<size_t>(i)] = idx[i];
    return p;
  }

  /// Up-looking factorization from the upper triangle of the permuted matrix.
  void factorize_upper(const SparseMatrix& ap, double delta) {
    const int n = n_;
    std::vector<int> parent(static_cast<size_t>(n), -1);
    std::vector<int> flag(static_cast<size_t>(n), -1);
    std::vector<int> lnz(static_cast<size_t>(n), 0);

    for (int k = 0; k < n; ++k) {
      flag[static_cast<size_t>(k)] = k;
      for (int p = ap.col_ptr()[k]; p < ap.col_ptr()[k + 1]; ++p) {
        int i = ap.row_idx()[static_cast<size_t>(p)];
        if (i >= k) continue;
        for (; flag[static_cast<size_t>(i)] != k; i = parent[static_cast<size_t>(i)]) {
          if (parent[static_cast<size_t>(i)] == -1) parent[static_cast<size_t>(i)] = k;
          ++lnz[static_cast<size_t>(i)];
          flag[static_cast<size_t>(i)] = k;
        }
      }
    }

    l_ptr_.assign(static_cast<size_t>(n) + 1, 0);
    for (int j = 0; j < n; ++j) l_ptr_[static_cast<size_t>(j) + 1] = l_ptr_[static_cast<size_t>(j)] + lnz[static_cast<size_t>(j)];
    l_row_.assign(static_cast<size_t>(l_ptr_[static_cast<size_t>(n)]), 0);
    l_val_.assign(static_cast<size_t>(l_ptr_[static_cast<size_t>(n)]), 0.0);
    d_.assign(static_cast<size_t>(n), 0.0);

    std::vector<double> y(static_cast<size_t>(n), 0.0);
    std::vector<int> pattern(static_cast<size_t>(n), 0);
    std::fill(flag.begin(), flag.end(), -1);
    std::fill(lnz.begin(), lnz.end(), 0);

    for (int k = 0; k < n; ++k) {
      int top = n;
      flag[static_cast<size_t>(k)] = k;
      for (int p = ap.col_ptr()[k]; p < ap.col_ptr()[k + 1]; ++p) {
        int i = ap.row_idx()[static_cast<size_t>(p)];
        if (i > k) continue;
        y[static_cast<size_t>(i)] += ap.values()[static_cast<size_t>(p)];
        int len = 0;
        for (; flag[static_cast<size_t>(i)] != k; i = parent[static_cast<size_t>(i)]) {
          pattern[static_cast<size_t>(len++)] = i;
          flag[static_cast<size_t>(i)] = k;
        }
        while (len > 0) pattern[static_cast<size_t>(--top)] = pattern[static_cast<size_t>(--len)];
      }
      double dk = y[static_cast<size_t>(k)];
      y[static_cast<size_t>(k)] = 0.0;
      for (; top < n; ++top) {
        const int i = pattern[static_cast<size_t>(top)];
        const double yi = y[static_cast<size_t>(i)];
        y[static_cast<size_t>(i)] = 0.0;
        const int p2 = l_ptr_[static_cast<size_t>(i)] + lnz[static_cast<size_t>(i)];
        for (int p = l_ptr_[static_cast<size_t>(i)]; p < p2; ++p)
          y[static_cast<size_t>(l_row_[static_cast<size_t>(p)])] -= l_val_[static_cast<size_t>(p)] * yi;
        const double lki = yi / d_[static_cast<size_t>(i)];
        dk -= lki * yi;
        l_row_[static_cast<size_t>(p2)] = k;
        l_val_[static_cast<size_t>(p2)] = lki;
        ++lnz[static_cast<size_t>(i)];
      }
      if (dk < delta) {
        dk += delta;
        if (dk < 0.5 * delta)
          throw IndefiniteMatrix("pivot " + std::to_string(perm_[static_cast<size_t>(k)]) +
                                     " below regularization floor",
                                 perm_[static_cast<size_t>(k)]);
      }
      d_[static_cast<size_t>(k)] = dk;
    }
  }

  int n_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::vector<int> perm_;     // perm_[new] = old
  std::vector<int> l_ptr_;    // CSC of strictly-lower L (unit diagonal implicit)
  std::vector<int> l_row_;
  std::vector<double> l_val_;
  std::vector<double> d_;
};

inline SymmetricFactorization factorize_spd(const SparseMatrix& m) {
  return SymmetricFactorization(m);
}

inline Vector solve_factored(const SymmetricFactorization& f, const Vector& r) {
  return f.solve(r);
}

} // namespace accqp::linalg
