#pragma once

#include <utility>

#include "accqp/padmm/two_block.hpp"
#include "accqp/splitting/engine.hpp"

namespace accqp::padmm {

/// Resolvent oracle induced by the pADMM substeps: applying it evaluates
/// (M + T)^{-1} M for the preconditioner M built from (sigma, B1, T1, T2).
template <TwoBlockProblem P>
class PadmmResolvent {
public:
  explicit PadmmResolvent(const P& problem) : p_(&problem) {}

  Eigen::Index dim() const { return p_->ydim() + p_->zdim() + p_->xdim(); }

  Vector apply(const Vector& wflat) const {
    PadmmIterate w = PadmmIterate::unpack(wflat, p_->ydim(), p_->zdim(), p_->xdim());
    PadmmIterate bar = resolvent(w);
    return bar.pack();
  }

  double seminorm(const Vector& v) const { return p_->seminorm(v); }

  /// Steps 1-3: z-subproblem, multiplier update, y-subproblem.
  PadmmIterate resolvent(const PadmmIterate& w) const {
    Vector z_bar;
    try {
      z_bar = p_->solve_z(w.y, w.x, w.z);
    } catch (const Error& e) {
      throw NumericalError(std::string("z-subproblem: ") + e.what());
    }
    Vector x_bar = w.x + p_->sigma() * (p_->b1(w.y) + p_->b2(z_bar) - p_->offset());
    Vector y_bar;
    try {
      y_bar = p_->solve_y(z_bar, x_bar, w.y);
    } catch (const Error& e) {
      throw NumericalError(std::string("y-subproblem: ") + e.what());
    }
    return {std::move(y_bar), std::move(z_bar), std::move(x_bar)};
  }

  const P& problem() const { return *p_; }

private:
  const P* p_;
};

/// One pADMM iteration: substeps followed by the relaxation
/// w^{k+1} = (1 - rho_k) w^k + rho_k w_bar^k. Returns both the relaxed point
/// and the substep output w_bar (the solution candidate).
template <TwoBlockProblem P>
std::pair<PadmmIterate, PadmmIterate> padmm_iterate(const PadmmIterate& w, const P& problem,
                                                    double sigma, double rho_k) {
  if (!(rho_k > 0.0 && rho_k <= 2.0))
    throw ConfigError("padmm_iterate: rho_k must be in (0, 2]");
  if (sigma != problem.sigma())
    throw ConfigError("padmm_iterate: sigma inconsistent with the problem oracles");
  PadmmResolvent<P> oracle(problem);
  PadmmIterate bar = oracle.resolvent(w);
  PadmmIterate next{(1.0 - rho_k) * w.y + rho_k * bar.y,
                    (1.0 - rho_k) * w.z + rho_k * bar.z,
                    (1.0 - rho_k) * w.x + rho_k * bar.x};
  return {std::move(next), std::move(bar)};
}

/// One accelerated pADMM iteration, i.e. the generic accelerated step driven
/// by the pADMM resolvent oracle.
template <TwoBlockProblem P>
splitting::AccelStepResult acc_padmm_iterate(const splitting::AccelState& state,
                                             const P& problem) {
  return splitting::accel_step(state, PadmmResolvent<P>(problem));
}

/// Natural-map KKT residual R(w); uses the composite form when the problem's
/// split has nonzero smooth parts.
template <TwoBlockProblem P>
KktResidual kkt_residual(const PadmmIterate& w, const P& problem) {
  Vector ry = w.y - problem.prox_p1(w.y - problem.grad_g1(w.y) - problem.b1_adj(w.x));
  Vector rz = w.z - problem.prox_p2(w.z - problem.grad_g2(w.z) - problem.b2_adj(w.x));
  Vector rf = problem.offset() - problem.b1(w.y) - problem.b2(w.z);
  KktResidual r;
  r.primal_y = ry.norm();
  r.primal_z = rz.norm();
  r.feasibility = rf.norm();
  r.aggregate = std::sqrt(ry.squaredNorm() + rz.squaredNorm() + rf.squaredNorm());
  return r;
}

/// f1(y_bar) + f2(z_bar) - reference, sign preserving.
template <TwoBlockProblem P>
double objective_gap(const PadmmIterate& w_bar, const P& problem, double reference_optimal) {
  return problem.f1(w_bar.y) + problem.f2(w_bar.z) - reference_optimal;
}

/// Residual blocks plus the objective gap against a known reference value.
template <TwoBlockProblem P>
KktResidual kkt_residual(const PadmmIterate& w, const P& problem, double reference_optimal) {
  KktResidual r = kkt_residual(w, problem);
  r.objective_gap = objective_gap(w, problem, reference_optimal);
  return r;
}

} // namespace accqp::padmm
