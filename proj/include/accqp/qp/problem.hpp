#pragma once

#include <string>

#include <Eigen/Core>

#include "accqp/errors.hpp"
#include "accqp/linalg/projection.hpp"
#include "accqp/linalg/sparse_matrix.hpp"

namespace accqp::qp {

using linalg::SparseMatrix;
using linalg::Vector;

/// Standard-form convex QP:
///   min 1/2 <x, Q x> + <c, x> + constant   s.t.  A x = b,  l <= x <= u.
struct QpProblem {
  std::string name;
  SparseMatrix q; ///< n x n symmetric positive semidefinite
  SparseMatrix a; ///< m x n, full row rank expected
  Vector b;
  Vector c;
  Vector l;
  Vector u;
  double objective_constant = 0.0;

  Eigen::Index n() const { return c.size(); }
  Eigen::Index m() const { return b.size(); }

  double primal_objective(const Vector& x) const {
    return 0.5 * x.dot(q.multiply(x)) + c.dot(x) + objective_constant;
  }

  /// Checks shapes, l <= u, and exact symmetry of Q.
  void validate() const {
    const auto nn = n();
    if (q.rows() != nn || q.cols() != nn) throw DimensionError("QpProblem: Q shape mismatch");
    if (a.cols() != nn || a.rows() != m()) throw DimensionError("QpProblem: A shape mismatch");
    if (l.size() != nn || u.size() != nn) throw DimensionError("QpProblem: bound length mismatch");
    for (Eigen::Index i = 0; i < nn; ++i)
      if (l[i] > u[i])
        throw InfeasibleBounds("QpProblem: l > u at column " + std::to_string(i));
    if (linalg::add(q, q.transpose().scaled(-1.0)).max_abs() != 0.0)
      throw DimensionError("QpProblem: Q is not symmetric");
  }
};

} // namespace accqp::qp
