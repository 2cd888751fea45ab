#pragma once

#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "accqp/padmm/iteration.hpp"
#include "accqp/qp/dual_problem.hpp"
#include "accqp/splitting/engine.hpp"

namespace accqp::qp {

enum class Algorithm { Padmm, AccPadmm };

/// Which point anchors a restart: the resolvent output w_bar (the provably
/// convergent sequence) or the accelerated iterate w.
enum class RestartAnchor { Candidate, Iterate };

enum class SolveStatus { Solved, MaxIter, Error };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "Solved";
    case SolveStatus::MaxIter: return "MaxIter";
    default: return "Error";
  }
}

/// Residual-balancing policy for the penalty parameter. The z2-sweep plus the
/// multiplier update make ||A x_bar - b|| vanish identically at every checked
/// iterate, so the balance compares the residual of the constraint the
/// splitting enforces (r_d) against the remaining quotients:
/// theta = r_d / max(r_p, r_qxy, r_comp). sigma is scaled up when
/// theta > threshold, down when theta < 1/threshold, clamped to
/// [sigma_min, sigma_max], with `cooldown_checks` quiet checks required
/// between consecutive changes.
struct SigmaUpdatePolicy {
  bool enabled = true;
  double threshold = 5.0;
  double factor = 1.5;
  int cooldown_checks = 2;
  double sigma_min = 1e-8;
  double sigma_max = 1e8;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::AccPadmm;
  double sigma0 = 1.0;
  double rho = 2.0;
  double alpha = 2.0;
  double tol = 1e-5;
  long max_iter = 10000;
  long check_every = 50;
  long restart_every = 200;
  bool restart_enabled = true;
  RestartAnchor restart_anchor = RestartAnchor::Candidate;
  long log_every = 0; ///< 0: log at checks only; 1: every iteration
  SigmaUpdatePolicy sigma_update;
  unsigned seed = 0;

  void validate() const {
    if (sigma0 <= 0.0) throw ConfigError("config: sigma0 must be positive");
    if (!(rho > 0.0 && rho <= 2.0)) throw ConfigError("config: rho must be in (0, 2]");
    if (alpha < 2.0) throw ConfigError("config: alpha must be >= 2");
    if (tol <= 0.0) throw ConfigError("config: tol must be positive");
    if (max_iter < 1) throw ConfigError("config: max_iter must be >= 1");
    if (check_every < 1) throw ConfigError("config: check_every must be >= 1");
    if (restart_every < 1) throw ConfigError("config: restart_every must be >= 1");
    if (sigma_update.factor <= 1.0) throw ConfigError("config: sigma factor must exceed 1");
    if (sigma_update.threshold <= 1.0) throw ConfigError("config: sigma threshold must exceed 1");
  }
};

/// Per-check diagnostics. kkt_res is exactly the max of the four quotients.
struct IterationRecord {
  long k = 0;
  double kkt_res = 0.0;
  double r_p = 0.0;
  double r_d = 0.0;
  double r_qxy = 0.0;
  double r_comp = 0.0;
  double seminorm_res = 0.0;
  double sigma = 0.0;
  double objective = 0.0;
  double time_s = 0.0;
};

/// Residual-balancing sigma update from the most recent check records.
/// Records are expected oldest-first; their sigma fields carry the value in
/// force at each check, which is how the cooldown is detected.
inline std::pair<double, bool> adapt_sigma(const std::vector<IterationRecord>& history,
                                           double sigma,
                                           const SigmaUpdatePolicy& policy = {}) {
  if (history.empty()) throw ConfigError("adapt_sigma: empty history");
  const size_t lookback = static_cast<size_t>(policy.cooldown_checks) + 1;
  const size_t first = history.size() > lookback ? history.size() - lookback : 0;
  for (size_t i = first; i < history.size(); ++i)
    if (history[i].sigma != sigma) return {sigma, false};

  const IterationRecord& last = history.back();
  const double rest = std::max({last.r_p, last.r_qxy, last.r_comp});
  double theta;
  if (rest == 0.0)
    theta = last.r_d == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  else
    theta = last.r_d / rest;

  double next = sigma;
  if (theta > policy.threshold)
    next = std::min(sigma * policy.factor, policy.sigma_max);
  else if (theta < 1.0 / policy.threshold)
    next = std::max(sigma / policy.factor, policy.sigma_min);
  return {next, next != sigma};
}

struct SolveResult {
  SolveStatus status = SolveStatus::MaxIter;
  long iterations = 0;
  DualIterate solution;      ///< the last resolvent output w_bar
  double objective = 0.0;    ///< primal objective at solution.x
  double kkt_res = 0.0;
  double solve_seconds = 0.0;
  long sigma_changes = 0;
  long restarts = 0;
  std::string message;
  std::vector<IterationRecord> log;
};

using RecordSink = std::function<void(const IterationRecord&, const DualIterate&)>;

/// Streams IterationRecords as CSV rows with a fixed, documented column set.
class CsvLogger {
public:
  explicit CsvLogger(std::ostream& out) : out_(&out) {
    *out_ << "k,kkt_res,r_p,r_d,r_qxy,r_comp,sigma,obj,seminorm_res,time_s\n";
  }

  void operator()(const IterationRecord& r, const DualIterate&) const {
    char buf[320];
    std::snprintf(buf, sizeof buf, "%ld,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.17g,%.9e,%.6f\n", r.k,
                  r.kkt_res, r.r_p, r.r_d, r.r_qxy, r.r_comp, r.sigma, r.objective,
                  r.seminorm_res, r.time_s);
    *out_ << buf;
  }

private:
  std::ostream* out_;
};

/// Runs the pADMM or accelerated pADMM on the restricted-Wolfe dual from
/// w0 = 0 (or the supplied warm start). KKT_res is checked at w_bar every
/// check_every iterations; the accelerated variant restarts every
/// restart_every iterations and whenever sigma changes.
inline SolveResult run_solver(const QpProblem& problem, const SolverConfig& config,
                              const std::optional<Vector>& warm_start = std::nullopt,
                              const RecordSink& sink = nullptr) {
  config.validate();

  SolveResult result;
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  try {
    problem.validate();
    DualProblem dual(problem, config.sigma0);
    padmm::PadmmResolvent<DualProblem> oracle(dual);

    Vector w = warm_start ? *warm_start : Vector::Zero(dual.wdim());
    if (w.size() != dual.wdim()) throw DimensionError("warm start: dimension mismatch");

    const bool accelerated = config.algorithm == Algorithm::AccPadmm;
    splitting::AccelState state;
    if (accelerated) state = splitting::AccelState::start(w, config.alpha, config.rho);

    std::vector<IterationRecord> checks;
    Vector w_bar;
    double last_semres = 0.0;
    long steps_since_restart = 0;

    for (long k = 1; k <= config.max_iter; ++k) {
      const bool at_check = k % config.check_every == 0 || k == config.max_iter;
      const bool at_log = config.log_every > 0 && k % config.log_every == 0;

      if (accelerated) {
        auto step = splitting::accel_step(state, oracle, at_check || at_log);
        w_bar = std::move(step.w_bar);
        last_semres = step.seminorm_residual;
        state = std::move(step.state);
      } else {
        Vector bar = oracle.apply(w);
        if (at_check || at_log) last_semres = config.rho * oracle.seminorm(w - bar);
        w = (1.0 - config.rho) * w + config.rho * bar;
        w_bar = std::move(bar);
      }
      ++steps_since_restart;

      if (at_check || at_log) {
        DualIterate it = dual.make_iterate(w_bar);
        KktQuotients q = dual.relative_kkt(it);
        IterationRecord rec;
        rec.k = k;
        rec.kkt_res = q.max;
        rec.r_p = q.r_p;
        rec.r_d = q.r_d;
        rec.r_qxy = q.r_qxy;
        rec.r_comp = q.r_comp;
        rec.seminorm_res = last_semres;
        rec.sigma = dual.sigma();
        rec.objective = problem.primal_objective(it.x);
        rec.time_s = elapsed();
        result.log.push_back(rec);
        if (sink) sink(rec, it);

        if (at_check) {
          checks.push_back(rec);
          if (rec.kkt_res <= config.tol) {
            result.status = SolveStatus::Solved;
            result.iterations = k;
            result.solution = std::move(it);
            result.kkt_res = rec.kkt_res;
            result.objective = rec.objective;
            result.solve_seconds = elapsed();
            return result;
          }
          if (config.sigma_update.enabled) {
            auto [sigma_next, changed] =
                adapt_sigma(checks, dual.sigma(), config.sigma_update);
            if (changed) {
              dual.set_sigma(sigma_next);
              ++result.sigma_changes;
              if (accelerated) {
                state = splitting::restart(
                    state, config.restart_anchor == RestartAnchor::Candidate ? w_bar : state.w);
                ++result.restarts;
                steps_since_restart = 0;
              }
            }
          }
        }
      }

      if (accelerated && config.restart_enabled && steps_since_restart >= config.restart_every) {
        state = splitting::restart(
            state, config.restart_anchor == RestartAnchor::Candidate ? w_bar : state.w);
        ++result.restarts;
        steps_since_restart = 0;
      }
    }

    result.status = SolveStatus::MaxIter;
    result.iterations = config.max_iter;
    DualIterate it = dual.make_iterate(w_bar);
    KktQuotients q = dual.relative_kkt(it);
    result.kkt_res = q.max;
    result.objective = problem.primal_objective(it.x);
    result.solution = std::move(it);
    result.solve_seconds = elapsed();
  } catch (const Error& e) {
    result.status = SolveStatus::Error;
    result.message = e.what();
    result.solve_seconds = elapsed();
  }
  return result;
}

} // namespace accqp::qp
