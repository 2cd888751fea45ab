#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "accqp/errors.hpp"
#include "accqp/linalg/projection.hpp"
#include "accqp/qps/file.hpp"
#include "accqp/qps/parse.hpp"

namespace accqp::bench {

/// Deterministic RNG with platform-independent draws (std distributions are
/// implementation-defined, these are not).
class DetRng {
public:
  explicit DetRng(std::uint64_t seed) : eng_(seed) {}

  double u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * u01(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do { u1 = u01(); } while (u1 <= 1e-300);
    const double u2 = u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(6.283185307179586476925287 * u2);
    have_spare_ = true;
    return r * std::cos(6.283185307179586476925287 * u2);
  }

  int index(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Shape and conditioning recipe for one synthetic stand-in problem. m and n
/// are the dimensions *after* conversion to standard form: the generator emits
/// ineq_rows inequality rows (one slack each), so the original file has
/// n - ineq_rows columns and m rows.
struct CorpusEntry {
  const char* name;
  int m;
  int n;
  int ineq_rows;
  double row_spread;  ///< row scaling 10^(+-row_spread)
  double quad_spread; ///< Q diagonal scaling 10^(+-quad_spread)
  double quad_frac;   ///< fraction of columns with curvature
  double obj_rhs;     ///< RHS on the objective row (negated constant)
  double row_base = 0.0;  ///< uniform row scaling 10^(row_base)
  double quad_base = 0.0; ///< uniform Q diagonal scaling 10^(quad_base)
  double active_frac = 0.4; ///< fraction of bounds/rows active at the optimum
  double degen_frac = 0.2;  ///< fraction of active constraints with zero multiplier
  double free_frac = 0.08;  ///< fraction of columns with no bounds at all
};

inline const std::array<CorpusEntry, 25>& corpus_table() {
  static const std::array<CorpusEntry, 25> table = {{
      // name, m, n, ineq, row_spread, quad_spread, quad_frac, obj_rhs,
      // row_base, quad_base, active_frac, degen_frac, free_frac
      {"AUG2D", 9604, 19404, 0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0},
      {"AUG2DC", 10000, 20200, 0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0},
      {"AUG3DQP", 972, 3133, 161, 0.2, 0.3, 0.9, 0.0, 0.0, 0.0, 0.2, 0.1, 0.1},
      {"CONT-101", 9801, 9900, 99, 0.4, 0.4, 0.7, 0.0, 0.0, 0.0, 0.3, 0.15, 0.6},
      {"CONT-201", 39601, 39800, 199, 0.4, 0.4, 0.7, 0.0, 0.0, 0.0, 0.3, 0.15, 0.6},
      {"CONT-300", 89401, 89700, 299, 0.4, 0.4, 0.7, 0.0, 0.0, 0.0, 0.3, 0.15, 0.6},
      {"GOULDQP3", 349, 699, 0, 0.3, 0.3, 0.95, 0.0, 0.0, 0.0, 0.25, 0.1, 0.5},
      {"HS118", 29, 44, 29, 1.5, 0.5, 0.2, 664.82045, 0.0, -2.4, 0.4, 0.2, 0.0},
      {"KSIP", 1000, 1020, 1000, 0.3, 0.4, 0.9, 0.0, 0.0, 0.0, 0.4, 0.2, 0.0},
      {"QRECIPE", 59, 116, 30, 0.9, 0.5, 0.25, 0.0, 0.0, -1.3, 0.55, 0.3, 0.0},
      {"QSCAGR25", 274, 473, 199, 1.0, 0.5, 0.2, 0.0, 0.0, -2.0, 0.4, 0.3, 0.0},
      {"QSCORPIO", 161, 226, 65, 0.2, 0.3, 0.8, 0.0, 0.0, 0.0, 0.2, 0.1, 0.3},
      {"QSCRS8", 192, 945, 162, 1.0, 0.6, 0.4, 0.0, 0.0, -1.0, 0.4, 0.2, 0.1},
      {"QSCSD1", 77, 760, 0, 0.4, 0.5, 0.6, 0.0, 0.0, 0.0, 0.3, 0.15, 0.7},
      {"QSCSD8", 397, 2750, 0, 0.4, 0.5, 0.6, 0.0, 0.0, 0.0, 0.3, 0.15, 0.7},
      {"QSCTAP2", 977, 2303, 470, 0.7, 0.6, 0.4, 0.0, 0.0, -1.0, 0.4, 0.2, 0.1},
      {"QSCTAP3", 1274, 3041, 620, 0.7, 0.6, 0.4, 0.0, 0.0, -1.0, 0.4, 0.2, 0.1},
      {"QSHIP04L", 288, 1901, 88, 0.8, 0.6, 0.5, 0.0, 0.0, -0.5, 0.4, 0.2, 0.1},
      {"QSHIP04S", 188, 1253, 68, 0.8, 0.6, 0.5, 0.0, 0.0, -0.5, 0.4, 0.2, 0.1},
      {"QSHIP08L", 478, 3137, 160, 0.8, 0.6, 0.5, 0.0, 0.0, -0.5, 0.4, 0.2, 0.1},
      {"QSHIP08S", 256, 1578, 86, 0.8, 0.6, 0.5, 0.0, 0.0, -0.5, 0.4, 0.2, 0.1},
      {"QSHIP12L", 637, 4226, 215, 0.8, 0.6, 0.5, 0.0, 0.0, -0.5, 0.4, 0.2, 0.1},
      {"QSHIP12S", 322, 1953, 110, 0.8, 0.6, 0.5, 0.0, 0.0, -0.5, 0.4, 0.2, 0.1},
      {"QSIERRA", 915, 2347, 528, 0.7, 0.6, 0.5, 0.0, 0.0, -0.5, 0.4, 0.2, 0.1},
      {"QSTANDAT", 192, 500, 32, 0.9, 0.6, 0.4, 0.0, 0.0, -1.0, 0.4, 0.2, 0.1},
  }};
  return table;
}

inline const CorpusEntry* find_corpus_entry(const std::string& name) {
  for (const auto& e : corpus_table())
    if (name == e.name) return &e;
  return nullptr;
}

namespace detail {
inline std::uint64_t name_seed(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  return h;
}
} // namespace detail

/// Builds the synthetic stand-in for one table entry. The instance is
/// constructed backward from a KKT point, so it is feasible, bounded and
/// solvable: bounds and an optimal x* with bound multipliers are drawn first,
/// row multipliers and right-hand sides realize the chosen activity pattern,
/// and c is then defined by stationarity c = A^T lambda + mu - Q x*. Equality
/// rows carry dominant anchor entries on distinct columns, and inequality rows
/// own their slack, so A has full row rank. Q is diagonally dominant on its
/// curvature block (positive semidefinite, rank deficient when quad_frac < 1).
inline qps::QpsFile synthesize(const CorpusEntry& entry,
                               double* optimal_objective = nullptr) {
  using namespace qps;
  DetRng rng(detail::name_seed(entry.name));

  const int m = entry.m;
  const int n_ineq = entry.ineq_rows;
  const int m_eq = m - n_ineq;
  const int n0 = entry.n - n_ineq;
  if (m_eq < 0 || n0 <= 0 || m_eq > n0)
    throw ConfigError(std::string("corpus entry '") + entry.name + "' is inconsistent");

  QpsFile f;
  f.name = entry.name;
  f.rows.push_back({RowType::Objective, "OBJ"});
  f.objective_row = 0;
  char buf[32];
  for (int i = 0; i < m_eq; ++i) {
    std::snprintf(buf, sizeof buf, "E%07d", i);
    f.rows.push_back({RowType::Equal, buf});
  }
  for (int i = 0; i < n_ineq; ++i) {
    std::snprintf(buf, sizeof buf, "%c%07d", i % 2 == 0 ? 'L' : 'G', i);
    f.rows.push_back({i % 2 == 0 ? RowType::LessEqual : RowType::GreaterEqual, buf});
  }
  for (int j = 0; j < n0; ++j) {
    std::snprintf(buf, sizeof buf, "X%07d", j);
    f.columns.push_back(buf);
  }

  auto multiplier = [&rng, &entry] {
    return rng.u01() < entry.degen_frac ? 0.0 : rng.uniform(0.1, 2.0);
  };

  // Bounds, the optimum x*, and net bound multipliers mu = mu_l - mu_u.
  std::vector<double> xs(static_cast<size_t>(n0), 0.0);
  std::vector<double> mu(static_cast<size_t>(n0), 0.0);
  for (int j = 0; j < n0; ++j) {
    double lo = 0.0;
    double hi = linalg::kInf;
    if (rng.u01() < entry.free_frac) {
      f.bounds.push_back({BoundType::Free, j, 0.0});
      lo = -linalg::kInf;
    } else {
      const double kind = rng.u01();
      if (kind < 0.65) {
        // default [0, +inf)
      } else if (kind < 0.81) {
        hi = rng.uniform(0.5, 5.0);
        f.bounds.push_back({BoundType::Upper, j, hi});
      } else if (kind < 0.90) {
        const double v = rng.uniform(-1.0, 1.0);
        f.bounds.push_back({BoundType::Fixed, j, v});
        lo = hi = v;
      } else {
        f.bounds.push_back({BoundType::MinusInfinity, j, 0.0});
        lo = -linalg::kInf;
        hi = rng.uniform(0.5, 3.0);
        f.bounds.push_back({BoundType::Upper, j, hi});
      }
    }

    if (lo == hi) {
      xs[static_cast<size_t>(j)] = lo;
      mu[static_cast<size_t>(j)] = rng.normal();
    } else if (rng.u01() < entry.active_frac && (lo > -linalg::kInf || hi < linalg::kInf)) {
      const bool at_lower = lo > -linalg::kInf && (hi == linalg::kInf || rng.u01() < 0.5);
      if (at_lower) {
        xs[static_cast<size_t>(j)] = lo;
        mu[static_cast<size_t>(j)] = multiplier();
      } else {
        xs[static_cast<size_t>(j)] = hi;
        mu[static_cast<size_t>(j)] = -multiplier();
      }
    } else {
      if (lo == -linalg::kInf && hi == linalg::kInf)
        xs[static_cast<size_t>(j)] = rng.normal();
      else if (hi == linalg::kInf)
        xs[static_cast<size_t>(j)] = lo + rng.uniform(0.2, 1.5);
      else if (lo == -linalg::kInf)
        xs[static_cast<size_t>(j)] = hi - rng.uniform(0.2, 1.5);
      else
        xs[static_cast<size_t>(j)] = lo + (hi - lo) * rng.uniform(0.1, 0.9);
    }
  }

  // Constraint entries, column-major lists. Equality rows get a dominant
  // anchor on column i plus small extras; inequality rows get three random
  // entries; a coverage pass puts every untouched column into some row.
  struct RowEntry { int row; double value; };
  std::vector<std::vector<RowEntry>> per_col(static_cast<size_t>(n0));
  std::vector<double> row_scale(static_cast<size_t>(m + 1), 1.0);
  auto add_entry = [&per_col](int row_record, int col, double v) {
    per_col[static_cast<size_t>(col)].push_back({row_record, v});
  };

  for (int i = 0; i < m; ++i)
    row_scale[static_cast<size_t>(1 + i)] =
        std::pow(10.0, entry.row_base + entry.row_spread * rng.uniform(-1.0, 1.0));

  for (int i = 0; i < m_eq; ++i) {
    const int row_record = 1 + i;
    const double scale = row_scale[static_cast<size_t>(row_record)];
    add_entry(row_record, i, scale * rng.uniform(3.0, 4.0) * (rng.u01() < 0.5 ? -1.0 : 1.0));
    for (int t = 0; t < 2; ++t)
      add_entry(row_record, rng.index(n0), scale * rng.uniform(-1.0, 1.0) / 2.0);
  }
  for (int i = 0; i < n_ineq; ++i) {
    const int row_record = 1 + m_eq + i;
    const double scale = row_scale[static_cast<size_t>(row_record)];
    for (int t = 0; t < 3; ++t)
      add_entry(row_record, rng.index(n0), scale * rng.uniform(-2.0, 2.0));
  }
  for (int j = 0; j < n0; ++j) {
    if (!per_col[static_cast<size_t>(j)].empty()) continue;
    const int row_record = 1 + rng.index(m);
    add_entry(row_record, j,
              row_scale[static_cast<size_t>(row_record)] * rng.uniform(0.5, 1.5) *
                  (rng.u01() < 0.5 ? -1.0 : 1.0));
  }

  std::vector<double> activity(static_cast<size_t>(m + 1), 0.0);
  for (int j = 0; j < n0; ++j)
    for (const auto& e : per_col[static_cast<size_t>(j)])
      activity[static_cast<size_t>(e.row)] += e.value * xs[static_cast<size_t>(j)];

  // Row multipliers and right-hand sides realizing the activity pattern.
  // Binding inequality rows pin the slack at its bound, which forces the
  // multiplier sign; non-binding rows have zero multiplier and slack room.
  std::vector<double> lambda(static_cast<size_t>(m + 1), 0.0);
  if (entry.obj_rhs != 0.0) f.rhs.push_back({0, entry.obj_rhs});
  for (int i = 0; i < m_eq; ++i) {
    const int row_record = 1 + i;
    lambda[static_cast<size_t>(row_record)] = rng.normal();
    f.rhs.push_back({row_record, activity[static_cast<size_t>(row_record)]});
  }
  for (int i = 0; i < n_ineq; ++i) {
    const int row_record = 1 + m_eq + i;
    const bool is_le = f.rows[static_cast<size_t>(row_record)].type == RowType::LessEqual;
    const double act = activity[static_cast<size_t>(row_record)];
    if (rng.u01() < entry.active_frac) {
      lambda[static_cast<size_t>(row_record)] = is_le ? -multiplier() : multiplier();
      f.rhs.push_back({row_record, act});
    } else {
      const double room = (0.1 + rng.u01()) * (1.0 + std::abs(act));
      f.rhs.push_back({row_record, is_le ? act + room : act - room});
    }
  }

  // Curvature block: scaled diagonal plus a weak chain of off-diagonal
  // couplings, diagonally dominant so Q stays positive semidefinite.
  std::vector<int> curves;
  for (int j = 0; j < n0; ++j)
    if (rng.u01() < entry.quad_frac) curves.push_back(j);
  std::vector<double> diag(curves.size());
  for (size_t t = 0; t < curves.size(); ++t)
    diag[t] = std::pow(10.0, entry.quad_base + entry.quad_spread * rng.uniform(-1.0, 1.0));
  std::vector<double> qx(static_cast<size_t>(n0), 0.0);
  for (size_t t = 0; t + 1 < curves.size(); ++t) {
    if (rng.u01() < 0.5) continue;
    const double off = 0.45 * std::min(diag[t], diag[t + 1]) * rng.uniform(-1.0, 1.0);
    if (off == 0.0) continue;
    f.quad.push_back({curves[t + 1], curves[t], off});
    qx[static_cast<size_t>(curves[t])] += off * xs[static_cast<size_t>(curves[t + 1])];
    qx[static_cast<size_t>(curves[t + 1])] += off * xs[static_cast<size_t>(curves[t])];
  }
  for (size_t t = 0; t < curves.size(); ++t) {
    f.quad.push_back({curves[t], curves[t], diag[t]});
    qx[static_cast<size_t>(curves[t])] += diag[t] * xs[static_cast<size_t>(curves[t])];
  }

  // Stationarity defines the objective: c = A^T lambda + mu - Q x*. The
  // objective entry also declares every column.
  for (int j = 0; j < n0; ++j) {
    double atl = 0.0;
    for (const auto& e : per_col[static_cast<size_t>(j)])
      atl += e.value * lambda[static_cast<size_t>(e.row)];
    const double cj = atl + mu[static_cast<size_t>(j)] - qx[static_cast<size_t>(j)];
    f.entries.push_back({j, 0, cj});
    for (const auto& e : per_col[static_cast<size_t>(j)]) f.entries.push_back({j, e.row, e.value});
  }

  if (optimal_objective) {
    double obj = -entry.obj_rhs; // the converted objective constant
    for (int j = 0; j < n0; ++j) {
      obj += 0.5 * qx[static_cast<size_t>(j)] * xs[static_cast<size_t>(j)];
      double atl = 0.0;
      for (const auto& e : per_col[static_cast<size_t>(j)])
        atl += e.value * lambda[static_cast<size_t>(e.row)];
      obj += (atl + mu[static_cast<size_t>(j)] - qx[static_cast<size_t>(j)]) *
             xs[static_cast<size_t>(j)];
    }
    *optimal_objective = obj;
  }
  return f;
}

inline qps::QpsFile synthesize(const std::string& name) {
  const CorpusEntry* e = find_corpus_entry(name);
  if (!e) throw ConfigError("unknown corpus problem '" + name + "'");
  return synthesize(*e);
}

/// Writes NAME.qps for every table entry (or a single name) into `dir`.
inline void write_corpus(const std::string& dir, const std::string& only = "") {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& e : corpus_table()) {
    if (!only.empty() && only != e.name) continue;
    std::ofstream out(fs::path(dir) / (std::string(e.name) + ".qps"));
    out << qps::serialize_qps(synthesize(e));
  }
}

} // namespace accqp::bench
