#pragma once

#include <functional>
#include <random>

#include <Eigen/Core>

namespace accqp::padmm {

/// Largest-eigenvalue estimate of a symmetric positive semidefinite operator
/// by a fixed number of power iterations from a seeded random start. Only used
/// for diagnostic bound checks, never inside the iteration itself.
inline double power_method(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                           Eigen::Index dim, int iterations = 50, unsigned seed = 0) {
  if (dim == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(rng);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd av = apply(v);
    const double norm = av.norm();
    if (norm == 0.0) return 0.0;
    lambda = v.dot(av);
    v = av / norm;
  }
  return lambda;
}

} // namespace accqp::padmm
