#pragma once

#include <concepts>
#include <limits>
#include <utility>

#include <Eigen/Core>

#include "accqp/errors.hpp"

namespace accqp::splitting {

using Vector = Eigen::VectorXd;

/// Evaluator of the resolvent-type map w -> (M + T)^{-1} M w together with the
/// seminorm ||.||_M it is nonexpansive in. Evaluation must be deterministic.
template <class O>
concept ResolventOracle = requires(const O& o, const Vector& w) {
  { o.apply(w) } -> std::convertible_to<Vector>;
  { o.seminorm(w) } -> std::convertible_to<double>;
  { o.dim() } -> std::convertible_to<Eigen::Index>;
};

/// State of the accelerated iteration: counter k, current point w, previous
/// relaxed point w_hat, and the fixed parameters alpha >= 2, rho in (0, 2].
struct AccelState {
  long k = 0;
  Vector w;
  Vector w_hat;
  double alpha = 2.0;
  double rho = 2.0;

  static AccelState start(Vector w0, double alpha, double rho) {
    if (alpha < 2.0) throw ConfigError("accel: alpha must be >= 2");
    if (!(rho > 0.0 && rho <= 2.0)) throw ConfigError("accel: rho must be in (0, 2]");
    AccelState s;
    s.k = 0;
    s.w = w0;
    s.w_hat = std::move(w0);
    s.alpha = alpha;
    s.rho = rho;
    return s;
  }
};

/// One relaxed resolvent step (1 - rho_k) w + rho_k (M+T)^{-1} M w.
template <ResolventOracle O>
Vector dppm_step(const Vector& w, double rho_k, const O& oracle) {
  if (!(rho_k > 0.0 && rho_k < 2.0)) throw ConfigError("dppm_step: rho_k must be in (0, 2)");
  if (w.size() != oracle.dim()) throw DimensionError("dppm_step: dimension mismatch");
  return (1.0 - rho_k) * w + rho_k * oracle.apply(w);
}

struct AccelStepResult {
  AccelState state; ///< state at k+1
  Vector w_bar;     ///< the resolvent output at step k, the solution candidate
  double seminorm_residual; ///< ||w^k - w_hat^{k+1}||_M
};

/// One accelerated step: resolvent, relaxation, then the anchored/momentum
/// combination. alpha = 2 reproduces the Halpern iteration exactly; alpha > 2
/// is the fast Krasnosel'skii-Mann damping. The seminorm residual is skipped
/// (NaN) when with_residual is false.
template <ResolventOracle O>
AccelStepResult accel_step(const AccelState& state, const O& oracle,
                           bool with_residual = true) {
  if (state.w.size() != oracle.dim()) throw DimensionError("accel_step: dimension mismatch");
  const double k = static_cast<double>(state.k);
  const double alpha = state.alpha;
  const double rho = state.rho;

  Vector w_bar = oracle.apply(state.w);
  Vector w_hat_next = (1.0 - rho) * state.w + rho * w_bar;
  Vector w_next = state.w + (alpha / (2.0 * (k + alpha))) * (w_hat_next - state.w) +
                  (k / (k + alpha)) * (w_hat_next - state.w_hat);

  AccelStepResult out;
  out.seminorm_residual = with_residual
                              ? oracle.seminorm(state.w - w_hat_next)
                              : std::numeric_limits<double>::quiet_NaN();
  out.state.k = state.k + 1;
  out.state.w = std::move(w_next);
  out.state.w_hat = std::move(w_hat_next);
  out.state.alpha = alpha;
  out.state.rho = rho;
  out.w_bar = std::move(w_bar);
  return out;
}

/// ||w^k - w_hat^{k+1}||_M at the given state (one oracle evaluation).
template <ResolventOracle O>
double seminorm_residual(const AccelState& state, const O& oracle) {
  Vector w_hat_next = (1.0 - state.rho) * state.w + state.rho * oracle.apply(state.w);
  return oracle.seminorm(state.w - w_hat_next);
}

/// Resets the counter and re-anchors the iteration at `anchor`.
inline AccelState restart(const AccelState& state, const Vector& anchor) {
  AccelState s;
  s.k = 0;
  s.w = anchor;
  s.w_hat = anchor;
  s.alpha = state.alpha;
  s.rho = state.rho;
  return s;
}

} // namespace accqp::splitting
