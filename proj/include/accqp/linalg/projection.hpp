#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "accqp/errors.hpp"

namespace accqp::linalg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Componentwise median(l, v, u). Bounds may be IEEE +-inf.
inline Eigen::VectorXd project_box(const Eigen::VectorXd& v, const Eigen::VectorXd& l,
                                   const Eigen::VectorXd& u) {
  if (l.size() != v.size() || u.size() != v.size())
    throw DimensionError("project_box: bound length mismatch");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (l[i] > u[i])
      throw InfeasibleBounds("project_box: l > u at component " + std::to_string(i));
    out[i] = std::min(std::max(v[i], l[i]), u[i]);
  }
  return out;
}

/// Support function of the box [l, u] at v: sum_i sup_{x in [l_i,u_i]} x_i v_i.
/// Returns +inf when some term is unbounded; 0 * inf is treated as 0.
inline double support_box(const Eigen::VectorXd& v, const Eigen::VectorXd& l,
                          const Eigen::VectorXd& u) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] > 0.0) {
      if (u[i] == kInf) return kInf;
      s += u[i] * v[i];
    } else if (v[i] < 0.0) {
      if (l[i] == -kInf) return kInf;
      s += l[i] * v[i];
    }
  }
  return s;
}

} // namespace accqp::linalg
