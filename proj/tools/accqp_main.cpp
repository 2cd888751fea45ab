#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "accqp/bench/corpus.hpp"
#include "accqp/qp/solver.hpp"
#include "accqp/qps/convert.hpp"
#include "accqp/qps/parse.hpp"

namespace fs = std::filesystem;
using namespace accqp;

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitMaxIter = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct SolveFlags {
  std::string algo = "acc";
  double alpha = 2.0;
  double rho = -1.0; // resolved per algorithm when unset
  double sigma = 1.0;
  bool fixed_sigma = false;
  bool no_restart = false;
  double tol = 1e-5;
  long max_iter = 10000;
  long check_every = 50;
  long restart_every = 200;
  std::string log_path;
  std::string dump_path;
  unsigned seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--algo", algo, "Algorithm: padmm or acc")
        ->check(CLI::IsMember({"padmm", "acc"}));
    cmd->add_option("--alpha", alpha, "Acceleration parameter alpha >= 2");
    cmd->add_option("--rho", rho, "Relaxation factor (default 1.9 padmm, 2.0 acc)");
    cmd->add_option("--sigma", sigma, "Initial penalty parameter");
    cmd->add_flag("--fixed-sigma", fixed_sigma, "Disable the adaptive sigma rule");
    cmd->add_flag("--no-restart", no_restart, "Disable periodic restarts (acc only)");
    cmd->add_option("--tol", tol, "Relative KKT tolerance");
    cmd->add_option("--max-iter", max_iter, "Iteration cap");
    cmd->add_option("--check-every", check_every, "Stopping-check period");
    cmd->add_option("--restart-every", restart_every, "Restart period (acc only)");
    cmd->add_option("--log", log_path,
                    "Write iteration records as CSV (columns: k,kkt_res,r_p,r_d,"
                    "r_qxy,r_comp,sigma,obj,seminorm_res,time_s)");
    cmd->add_option("--dump", dump_path,
                    "Write the converted standard-form problem as a normalized text dump");
    cmd->add_option("--seed", seed, "Seed for diagnostic estimators");
  }

  qp::SolverConfig config() const {
    qp::SolverConfig cfg;
    cfg.algorithm = algo == "padmm" ? qp::Algorithm::Padmm : qp::Algorithm::AccPadmm;
    cfg.rho = rho > 0.0 ? rho : (algo == "padmm" ? 1.9 : 2.0);
    cfg.alpha = alpha;
    cfg.sigma0 = sigma;
    cfg.sigma_update.enabled = !fixed_sigma;
    cfg.restart_enabled = !no_restart;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.check_every = check_every;
    cfg.restart_every = restart_every;
    cfg.seed = seed;
    return cfg;
  }
};

qp::QpProblem load_problem(const std::string& path) {
  qps::QpsFile file = qps::parse_qps_path(path);
  for (const auto& w : file.warnings) std::cerr << "warning: " << w << "\n";
  auto [prob, report] = qps::to_standard_form(file);
  return prob;
}

int status_code(const qp::SolveResult& r) {
  switch (r.status) {
    case qp::SolveStatus::Solved: return kExitSolved;
    case qp::SolveStatus::MaxIter: return kExitMaxIter;
    default: return kExitNumerical;
  }
}

int cmd_solve(const std::string& path, const SolveFlags& flags) {
  qp::QpProblem prob = load_problem(path);
  if (!flags.dump_path.empty()) {
    std::ofstream dump(flags.dump_path);
    if (!dump) throw ParseError("cannot open dump file '" + flags.dump_path + "'");
    dump << qps::normalized_dump(prob);
  }
  std::ofstream log_stream;
  std::optional<qp::CsvLogger> logger;
  qp::RecordSink sink;
  if (!flags.log_path.empty()) {
    log_stream.open(flags.log_path);
    if (!log_stream) throw ParseError("cannot open log file '" + flags.log_path + "'");
    logger.emplace(log_stream);
    sink = [&logger](const qp::IterationRecord& rec, const qp::DualIterate& it) {
      (*logger)(rec, it);
    };
  }
  qp::SolveResult r = qp::run_solver(prob, flags.config(), std::nullopt, sink);
  std::printf("problem    %s (m=%ld, n=%ld)\n", prob.name.c_str(), static_cast<long>(prob.m()),
              static_cast<long>(prob.n()));
  std::printf("status     %s\n", qp::to_string(r.status));
  std::printf("iterations %ld\n", r.iterations);
  std::printf("kkt_res    %.6e\n", r.kkt_res);
  std::printf("objective  %.12e\n", r.objective);
  std::printf("time_s     %.3f\n", r.solve_seconds);
  if (!r.message.empty()) std::printf("message    %s\n", r.message.c_str());
  return status_code(r);
}

struct BenchConfigResult {
  long iterations = -1;
  double time_s = 0.0;
  double kkt = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;
};

int cmd_bench(const std::string& dir, const std::string& out_path, double tol, long max_iter) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    if (ext == ".qps" || ext == ".mps") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  const std::vector<std::string> config_names = {"a", "b2", "b15", "b30", "b45"};
  const std::vector<double> alphas = {0.0, 2.0, 15.0, 30.0, 45.0};

  std::ofstream out(out_path);
  if (!out) throw ParseError("cannot open output '" + out_path + "'");
  out << "problem,m,n";
  for (const auto& c : config_names) out << ",iter_" << c << ",time_" << c << ",kkt_" << c;
  out << ",note\n";

  std::vector<std::array<BenchConfigResult, 5>> rows;
  std::vector<std::string> names;
  for (const auto& path : files) {
    std::string note;
    std::array<BenchConfigResult, 5> row{};
    long m = 0, n = 0;
    try {
      qp::QpProblem prob = load_problem(path.string());
      m = prob.m();
      n = prob.n();
      for (size_t c = 0; c < config_names.size(); ++c) {
        qp::SolverConfig cfg;
        cfg.tol = tol;
        cfg.max_iter = max_iter;
        if (c == 0) {
          cfg.algorithm = qp::Algorithm::Padmm;
          cfg.rho = 1.9;
        } else {
          cfg.algorithm = qp::Algorithm::AccPadmm;
          cfg.rho = 2.0;
          cfg.alpha = alphas[c];
        }
        qp::SolveResult r = qp::run_solver(prob, cfg);
        row[c].iterations = r.iterations;
        row[c].time_s = r.solve_seconds;
        row[c].kkt = r.kkt_res;
        if (r.status == qp::SolveStatus::Error) {
          row[c].failed = true;
          row[c].iterations = -1;
          note += config_names[c] + ": " + r.message + "; ";
        }
      }
    } catch (const Error& e) {
      note = e.what();
      for (auto& r : row) r.failed = true;
    }
    names.push_back(path.stem().string());
    rows.push_back(row);
    out << path.stem().string() << "," << m << "," << n;
    for (const auto& r : row) {
      out << "," << r.iterations << "," << r.time_s << ",";
      if (std::isnan(r.kkt)) out << "nan";
      else out << r.kkt;
    }
    out << "," << note << "\n";
    std::printf("%-12s done\n", path.stem().string().c_str());
  }

  // summary rows: mean/median/min/max per configuration over completed runs
  auto column = [&rows](size_t c, auto proj) {
    std::vector<double> vals;
    for (const auto& row : rows)
      if (!row[c].failed) vals.push_back(proj(row[c]));
    return vals;
  };
  auto stat_row = [&](const char* label, auto reduce) {
    out << label << ",,";
    for (size_t c = 0; c < config_names.size(); ++c) {
      auto iters = column(c, [](const BenchConfigResult& r) { return double(r.iterations); });
      auto times = column(c, [](const BenchConfigResult& r) { return r.time_s; });
      auto kkts = column(c, [](const BenchConfigResult& r) { return r.kkt; });
      out << "," << reduce(iters) << "," << reduce(times) << "," << reduce(kkts);
    }
    out << ",\n";
  };
  auto mean = [](std::vector<double> v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
  };
  auto median = [](std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  };
  auto vmin = [](std::vector<double> v) {
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
  };
  auto vmax = [](std::vector<double> v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  };
  stat_row("__mean__", mean);
  stat_row("__median__", median);
  stat_row("__min__", vmin);
  stat_row("__max__", vmax);

  auto iters_a = column(0, [](const BenchConfigResult& r) { return double(r.iterations); });
  auto iters_b15 = column(2, [](const BenchConfigResult& r) { return double(r.iterations); });
  double reduction = 0.0;
  if (!iters_a.empty() && mean(iters_a) > 0.0)
    reduction = 100.0 * (1.0 - mean(iters_b15) / mean(iters_a));
  out << "__reduction_b15_vs_a_pct__,,," << reduction << ",,,,,,,,,,,,,,,\n";
  std::printf("acc(alpha=15) mean iteration reduction vs padmm: %.1f%%\n", reduction);
  return kExitSolved;
}

int cmd_rate(const std::string& path, const std::string& out_path, double alpha, double sigma,
             double rho, long max_iter, double tol) {
  qp::QpProblem prob = load_problem(path);

  // reference objective from a tight adaptive run
  qp::SolverConfig ref_cfg;
  ref_cfg.tol = 1e-9;
  ref_cfg.max_iter = 50000;
  qp::SolveResult ref = qp::run_solver(prob, ref_cfg);
  qp::DualProblem ref_dual(prob, 1.0);
  const double f_star = ref_dual.dual_objective(ref.solution);

  std::ofstream out(out_path);
  if (!out) throw ParseError("cannot open output '" + out_path + "'");
  out << "k,seminorm_res,kkt_res,abs_h\n";

  qp::SolverConfig cfg;
  cfg.algorithm = qp::Algorithm::AccPadmm;
  cfg.alpha = alpha;
  cfg.rho = rho;
  cfg.sigma0 = sigma;
  cfg.sigma_update.enabled = false;
  cfg.restart_enabled = false;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  cfg.log_every = 1;

  qp::DualProblem h_dual(prob, sigma);
  char buf[160];
  qp::RecordSink sink = [&](const qp::IterationRecord& rec, const qp::DualIterate& it) {
    const double h = h_dual.dual_objective(it) - f_star;
    std::snprintf(buf, sizeof buf, "%ld,%.9e,%.9e,%.9e\n", rec.k, rec.seminorm_res, rec.kkt_res,
                  std::abs(h));
    out << buf;
  };
  qp::SolveResult r = qp::run_solver(prob, cfg, std::nullopt, sink);
  std::printf("status %s after %ld iterations, kkt_res %.3e, log written to %s\n",
              qp::to_string(r.status), r.iterations, r.kkt_res, out_path.c_str());
  return status_code(r);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated preconditioned ADMM solver for convex quadratic programs"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Solve a single QPS file");
  std::string solve_path;
  solve->add_option("file", solve_path, "QPS/MPS file")->required();
  SolveFlags flags;
  flags.attach(solve);

  // bench
  auto* benchcmd = app.add_subcommand("bench", "Run the five-configuration sweep on a directory");
  std::string bench_dir;
  std::string bench_out = "bench.csv";
  double bench_tol = 1e-5;
  long bench_max_iter = 10000;
  benchcmd->add_option("dir", bench_dir, "Directory of QPS files")->required();
  benchcmd->add_option("--out", bench_out,
                       "Output CSV (columns: problem,m,n, then iter/time/kkt per config "
                       "a,b2,b15,b30,b45, plus note; summary rows follow)");
  benchcmd->add_option("--tol", bench_tol, "Relative KKT tolerance");
  benchcmd->add_option("--max-iter", bench_max_iter, "Iteration cap");

  // rate
  auto* rate = app.add_subcommand("rate", "Fixed-sigma, no-restart run logging every iteration");
  std::string rate_path;
  std::string rate_out = "rate.csv";
  double rate_alpha = 2.0;
  double rate_sigma = 1.0;
  double rate_rho = 2.0;
  long rate_max_iter = 5000;
  double rate_tol = 1e-12;
  rate->add_option("file", rate_path, "QPS/MPS file")->required();
  rate->add_option("--out", rate_out,
                   "Output CSV (columns: k,seminorm_res,kkt_res,abs_h)");
  rate->add_option("--alpha", rate_alpha, "Acceleration parameter");
  rate->add_option("--sigma", rate_sigma, "Fixed penalty parameter");
  rate->add_option("--rho", rate_rho, "Relaxation factor");
  rate->add_option("--max-iter", rate_max_iter, "Iteration cap");
  rate->add_option("--tol", rate_tol, "Relative KKT tolerance");

  // corpus
  auto* corpus = app.add_subcommand("corpus", "Write the bundled synthetic benchmark problems");
  std::string corpus_dir = "corpus";
  std::string corpus_only;
  corpus->add_option("--out", corpus_dir, "Output directory");
  corpus->add_option("--only", corpus_only, "Write a single problem by name");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(solve_path, flags);
    if (*benchcmd) return cmd_bench(bench_dir, bench_out, bench_tol, bench_max_iter);
    if (*rate) return cmd_rate(rate_path, rate_out, rate_alpha, rate_sigma, rate_rho,
                               rate_max_iter, rate_tol);
    if (*corpus) {
      bench::write_corpus(corpus_dir, corpus_only);
      std::printf("corpus written to %s\n", corpus_dir.c_str());
      return kExitSolved;
    }
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InfeasibleBounds& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ConfigError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}
