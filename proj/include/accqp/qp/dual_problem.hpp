#pragma once

#include <memory>
#include <utility>

#include "accqp/linalg/ldlt.hpp"
#include "accqp/linalg/projection.hpp"
#include "accqp/linalg/sparse_matrix.hpp"
#include "accqp/qp/problem.hpp"

namespace accqp::qp {

using linalg::SymmetricFactorization;

/// Iterate of the dual solver. The y block is stored as the unconstrained
/// output of the (I + sigma Q) solve; only Q y and <y, Q y> are ever consumed,
/// and both are exact for the surrogate, so the range-space projection is
/// never formed. qy caches Q * y and is refreshed whenever the iterate is
/// rebuilt from a flat vector.
struct DualIterate {
  Vector y;
  Vector z1;
  Vector z2;
  Vector x;
  Vector qy;
};

/// Four relative KKT quotients of the stopping rule plus their max.
struct KktQuotients {
  double r_p = 0.0;    ///< ||A x - b|| / (1 + ||b||)
  double r_d = 0.0;    ///< ||-Q y + z1 + A^T z2 - c|| / (1 + ||c||)
  double r_qxy = 0.0;  ///< ||Q x - Q y|| / (1 + ||Q x|| + ||Q y||)
  double r_comp = 0.0; ///< ||x - Pi_C(x - z1)|| / (1 + ||x|| + ||z1||)
  double max = 0.0;
};

/// The restricted-Wolfe dual of a convex QP as a two-block problem:
///   min 1/2 <y, Q y> + delta_C^*(-z1) - <b, z2>
///   s.t. -Q y + z1 + A^T z2 = c,
/// with B1 = -Q, B2 = [I, A^T], T1 = 0 and T2 the symmetric Gauss-Seidel
/// operator of sigma B2^* B2, so the z-subproblem splits into three sweeps
/// that reuse one factorization of A A^T. The (I + sigma Q) factorization is
/// rebuilt only when sigma changes. One solve drives a DualProblem from a
/// single thread; the underlying QpProblem is immutable and shareable.
class DualProblem {
public:
  DualProblem(const QpProblem& problem, double sigma)
      : qp_(&problem), at_(problem.a.transpose()), sigma_(sigma) {
    if (sigma <= 0.0) throw ConfigError("DualProblem: sigma must be positive");
    aat_factor_ = std::make_shared<SymmetricFactorization>(linalg::aat(problem.a));
    ++aat_factorizations_;
    refactor_iq();
  }

  const QpProblem& data() const { return *qp_; }
  double sigma() const { return sigma_; }

  Eigen::Index ydim() const { return qp_->n(); }
  Eigen::Index zdim() const { return qp_->n() + qp_->m(); }
  Eigen::Index xdim() const { return qp_->n(); }
  Eigen::Index wdim() const { return ydim() + zdim() + xdim(); }

  /// Changes the penalty parameter; refactorizes I + sigma Q only (the A A^T
  /// factor is sigma-independent).
  void set_sigma(double sigma) {
    if (sigma <= 0.0) throw ConfigError("set_sigma: sigma must be positive");
    if (sigma == sigma_) return;
    sigma_ = sigma;
    refactor_iq();
  }

  long aat_factorizations() const { return aat_factorizations_; }
  long iq_factorizations() const { return iq_factorizations_; }

  // Two-block interface ------------------------------------------------

  Vector b1(const Vector& y) const { return -qp_->q.multiply(y); }
  Vector b1_adj(const Vector& x) const { return -qp_->q.multiply(x); }

  Vector b2(const Vector& z) const {
    return z.head(qp_->n()) + at_.multiply(z.tail(qp_->m()));
  }

  Vector b2_adj(const Vector& x) const {
    Vector out(zdim());
    out.head(qp_->n()) = x;
    out.tail(qp_->m()) = qp_->a.multiply(x);
    return out;
  }

  Vector offset() const { return qp_->c; }

  double f1(const Vector& y) const { return 0.5 * y.dot(qp_->q.multiply(y)); }

  double f2(const Vector& z) const {
    return linalg::support_box(-z.head(qp_->n()), qp_->l, qp_->u) - qp_->b.dot(z.tail(qp_->m()));
  }

  Vector grad_g1(const Vector& y) const { return qp_->q.multiply(y); }

  Vector grad_g2(const Vector& z) const {
    Vector g = Vector::Zero(z.size());
    g.tail(qp_->m()) = -qp_->b;
    return g;
  }

  Vector prox_p1(const Vector& v) const { return v; }

  /// prox of delta_C^*(-z1) acting on the z1 part, identity on z2.
  Vector prox_p2(const Vector& v) const {
    Vector out = v;
    const auto n = qp_->n();
    out.head(n) = v.head(n) + linalg::project_box(-v.head(n), qp_->l, qp_->u);
    return out;
  }

  /// Three-sweep z-update z2' -> z1 -> z2 (one A A^T factorization, reused).
  std::pair<Vector, Vector> sgs_z_update(const Vector& y, const Vector& x,
                                         const Vector& z1_prev) const {
    const Vector s0 = shift(y, x);
    const Vector z2_first = z2_sweep(s0, z1_prev);
    const Vector z1 = z1_prox(s0 + at_.multiply(z2_first));
    Vector z2 = z2_sweep(s0, z1);
    return {z1, std::move(z2)};
  }

  Vector solve_z(const Vector& y, const Vector& x, const Vector& z_prev) const {
    auto [z1, z2] = sgs_z_update(y, x, z_prev.head(qp_->n()));
    Vector z(zdim());
    z << z1, z2;
    return z;
  }

  /// Minimizer over z2 of the augmented Lagrangian at (y, z1, x):
  /// sigma A A^T z2 = b - sigma A(-Q y + z1 - c + x / sigma).
  Vector solve_z2(const Vector& y, const Vector& z1, const Vector& x) const {
    return z2_sweep(shift(y, x), z1);
  }

  /// Closed-form z1 update via the Moreau decomposition: with
  /// r = -Q y + A^T z2 - c + x / sigma, returns Pi_C(sigma r) / sigma - r.
  Vector solve_z1(const Vector& y, const Vector& z2, const Vector& x) const {
    return z1_prox(shift(y, x) + at_.multiply(z2));
  }

  Vector solve_y(const Vector& z_bar, const Vector& x_bar, const Vector& /*y_prev*/) const {
    return solve_y_with_qy(z_bar, x_bar).first;
  }

  /// Solves (I + sigma Q) w = sigma (z1 + A^T z2 - c) + x; returns the
  /// y-surrogate w and Q w = (rhs - w) / sigma.
  std::pair<Vector, Vector> solve_y_with_qy(const Vector& z_bar, const Vector& x_bar) const {
    Vector rhs = sigma_ * (z_bar.head(qp_->n()) + at_.multiply(z_bar.tail(qp_->m())) - qp_->c) +
                 x_bar;
    Vector w = iq_factor_->solve(rhs);
    Vector qy = (rhs - w) / sigma_;
    return {std::move(w), std::move(qy)};
  }

  /// ||v||_M with M from the preconditioner: T1 = 0, T2 = sGS, so
  /// ||v||_M^2 = (1/sigma) ||dx - sigma Q dy||^2 + sigma <A dz1, (A A^T)^{-1} A dz1>.
  double seminorm(const Vector& v) const {
    const auto n = qp_->n();
    const auto m = qp_->m();
    const auto dy = v.segment(0, n);
    const auto dz1 = v.segment(n, n);
    const auto dx = v.segment(2 * n + m, n);
    const Vector qdy = qp_->q.multiply(dy);
    const Vector adz1 = qp_->a.multiply(dz1);
    double sq = (dx - sigma_ * qdy).squaredNorm() / sigma_ +
                sigma_ * adz1.dot(aat_factor_->solve(adz1));
    return std::sqrt(std::max(sq, 0.0));
  }

  // Iterates and residuals ----------------------------------------------

  DualIterate make_iterate(const Vector& flat) const {
    const auto n = qp_->n();
    const auto m = qp_->m();
    DualIterate it;
    it.y = flat.segment(0, n);
    it.z1 = flat.segment(n, n);
    it.z2 = flat.segment(2 * n, m);
    it.x = flat.segment(2 * n + m, n);
    it.qy = qp_->q.multiply(it.y);
    return it;
  }

  KktQuotients relative_kkt(const DualIterate& it) const {
    const Vector ax = qp_->a.multiply(it.x);
    const Vector qx = qp_->q.multiply(it.x);
    const Vector dual_res = -it.qy + it.z1 + at_.multiply(it.z2) - qp_->c;
    KktQuotients r;
    r.r_p = (ax - qp_->b).norm() / (1.0 + qp_->b.norm());
    r.r_d = dual_res.norm() / (1.0 + qp_->c.norm());
    r.r_qxy = (qx - it.qy).norm() / (1.0 + qx.norm() + it.qy.norm());
    r.r_comp = (it.x - linalg::project_box(it.x - it.z1, qp_->l, qp_->u)).norm() /
               (1.0 + it.x.norm() + it.z1.norm());
    r.max = std::max(std::max(r.r_p, r.r_d), std::max(r.r_qxy, r.r_comp));
    return r;
  }

  /// Dual objective f1(y) + f2(z); +inf while -z1 is outside the support-
  /// finite region (never the case at a fresh prox output).
  double dual_objective(const DualIterate& it) const {
    double support = linalg::support_box(-it.z1, qp_->l, qp_->u);
    return 0.5 * it.y.dot(it.qy) + support - qp_->b.dot(it.z2);
  }

private:
  Vector shift(const Vector& y, const Vector& x) const {
    return -qp_->q.multiply(y) - qp_->c + x / sigma_;
  }

  Vector z2_sweep(const Vector& s0, const Vector& z1) const {
    Vector rhs = qp_->b - sigma_ * qp_->a.multiply(s0 + z1);
    return aat_factor_->solve(rhs) / sigma_;
  }

  Vector z1_prox(const Vector& r) const {
    // fused form of Pi_C(sigma r)/sigma - r: exact zero on interior components
    const Vector sr = sigma_ * r;
    return (linalg::project_box(sr, qp_->l, qp_->u) - sr) / sigma_;
  }

  void refactor_iq() {
    iq_factor_ = std::make_shared<SymmetricFactorization>(
        linalg::add(linalg::SparseMatrix::identity(static_cast<int>(qp_->n())),
                    qp_->q.scaled(sigma_)));
    ++iq_factorizations_;
  }

  const QpProblem* qp_;
  SparseMatrix at_;
  double sigma_;
  std::shared_ptr<SymmetricFactorization> aat_factor_;
  std::shared_ptr<SymmetricFactorization> iq_factor_;
  long aat_factorizations_ = 0;
  long iq_factorizations_ = 0;
};

} // namespace accqp::qp
