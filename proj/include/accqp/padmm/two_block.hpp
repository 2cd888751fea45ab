#pragma once

#include <cmath>
#include <concepts>

#include <Eigen/Core>

#include "accqp/errors.hpp"

namespace accqp::padmm {

using Vector = Eigen::VectorXd;

/// A two-block problem min f1(y) + f2(z) s.t. B1 y + B2 z = c exposed through
/// its subproblem oracles. solve_z / solve_y must return the unique minimizers
/// of the proximal augmented-Lagrangian subproblems at the problem's sigma.
/// grad_g*/prox_p* describe the smooth/nonsmooth split f_i = g_i + p_i used by
/// the residual mapping; a plain problem uses g_i = 0 and p_i = f_i.
/// seminorm evaluates the preconditioner seminorm on a flat [y; z; x] vector.
template <class P>
concept TwoBlockProblem = requires(const P& p, const Vector& v) {
  { p.ydim() } -> std::convertible_to<Eigen::Index>;
  { p.zdim() } -> std::convertible_to<Eigen::Index>;
  { p.xdim() } -> std::convertible_to<Eigen::Index>;
  { p.sigma() } -> std::convertible_to<double>;
  { p.solve_z(v, v, v) } -> std::convertible_to<Vector>;
  { p.solve_y(v, v, v) } -> std::convertible_to<Vector>;
  { p.b1(v) } -> std::convertible_to<Vector>;
  { p.b1_adj(v) } -> std::convertible_to<Vector>;
  { p.b2(v) } -> std::convertible_to<Vector>;
  { p.b2_adj(v) } -> std::convertible_to<Vector>;
  { p.offset() } -> std::convertible_to<Vector>;
  { p.f1(v) } -> std::convertible_to<double>;
  { p.f2(v) } -> std::convertible_to<double>;
  { p.grad_g1(v) } -> std::convertible_to<Vector>;
  { p.grad_g2(v) } -> std::convertible_to<Vector>;
  { p.prox_p1(v) } -> std::convertible_to<Vector>;
  { p.prox_p2(v) } -> std::convertible_to<Vector>;
  { p.seminorm(v) } -> std::convertible_to<double>;
};

/// The iterate w = (y, z, x).
struct PadmmIterate {
  Vector y;
  Vector z;
  Vector x;

  Eigen::Index dim() const { return y.size() + z.size() + x.size(); }

  Vector pack() const {
    Vector w(dim());
    w << y, z, x;
    return w;
  }

  static PadmmIterate unpack(const Vector& w, Eigen::Index ny, Eigen::Index nz,
                             Eigen::Index nx) {
    if (w.size() != ny + nz + nx) throw DimensionError("iterate unpack: length mismatch");
    return {w.segment(0, ny), w.segment(ny, nz), w.segment(ny + nz, nx)};
  }

  static PadmmIterate zero(Eigen::Index ny, Eigen::Index nz, Eigen::Index nx) {
    return {Vector::Zero(ny), Vector::Zero(nz), Vector::Zero(nx)};
  }
};

/// Blocks of the natural-map KKT residual plus the objective gap when known.
struct KktResidual {
  double primal_y = 0.0;     ///< ||y - Prox(y - grad g1(y) - B1* x)||
  double primal_z = 0.0;     ///< ||z - Prox(z - grad g2(z) - B2* x)||
  double feasibility = 0.0;  ///< ||c - B1 y - B2 z||
  double aggregate = 0.0;    ///< Euclidean norm of the stacked blocks
  double objective_gap = std::numeric_limits<double>::quiet_NaN();
};

} // namespace accqp::padmm
