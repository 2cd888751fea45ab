#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "accqp/errors.hpp"
#include "accqp/linalg/projection.hpp"
#include "accqp/qp/problem.hpp"
#include "accqp/qps/file.hpp"

namespace accqp::qps {

using linalg::kInf;

struct ConversionReport {
  int original_ineq_rows = 0; ///< rows that received a slack (L/G/ranged)
  int original_eq_rows = 0;
  int original_cols = 0;
  int slacks_added = 0;
  int bound_translations = 0;
  double objective_constant = 0.0;
};

/// Converts a parsed QPS file to the standard form
///   min 1/2 x^T Q x + c^T x  s.t.  A x = b, l <= x <= u.
/// Every L/G/ranged row gains a slack column whose bounds encode the row
/// interval (row a^T x in [lo, hi] becomes a^T x + s = rhs, s in
/// [rhs - hi, rhs - lo]); pure equality rows stay slack-free. Default variable
/// bounds are [0, +inf). The objective constant is the objective-row RHS with
/// flipped sign.
inline std::pair<qp::QpProblem, ConversionReport> to_standard_form(const QpsFile& file) {
  const int n_rows = static_cast<int>(file.rows.size());
  const int n0 = static_cast<int>(file.columns.size());

  std::vector<double> rhs(static_cast<size_t>(n_rows), 0.0);
  std::vector<bool> has_range(static_cast<size_t>(n_rows), false);
  std::vector<double> range(static_cast<size_t>(n_rows), 0.0);
  for (const auto& r : file.rhs) rhs[static_cast<size_t>(r.row)] = r.value;
  for (const auto& r : file.ranges) {
    has_range[static_cast<size_t>(r.row)] = true;
    range[static_cast<size_t>(r.row)] = r.value;
  }

  // Row intervals [lo, hi] per constraint row, then the equality mapping.
  struct RowInfo {
    int a_row = -1;
    bool slack = false;
    double lo = 0.0, hi = 0.0;
  };
  std::vector<RowInfo> info(static_cast<size_t>(n_rows));
  ConversionReport report;
  report.original_cols = n0;

  int m = 0;
  for (int r = 0; r < n_rows; ++r) {
    const RowType t = file.rows[static_cast<size_t>(r)].type;
    if (t == RowType::Objective) continue;
    RowInfo& ri = info[static_cast<size_t>(r)];
    ri.a_row = m++;
    const double v = rhs[static_cast<size_t>(r)];
    const double rg = range[static_cast<size_t>(r)];
    switch (t) {
      case RowType::Equal:
        if (has_range[static_cast<size_t>(r)]) {
          ri.lo = rg >= 0.0 ? v : v + rg;
          ri.hi = rg >= 0.0 ? v + rg : v;
        } else {
          ri.lo = ri.hi = v;
        }
        break;
      case RowType::LessEqual:
        ri.lo = has_range[static_cast<size_t>(r)] ? v - std::abs(rg) : -kInf;
        ri.hi = v;
        break;
      case RowType::GreaterEqual:
        ri.lo = v;
        ri.hi = has_range[static_cast<size_t>(r)] ? v + std::abs(rg) : kInf;
        break;
      default:
        break;
    }
    ri.slack = t != RowType::Equal || has_range[static_cast<size_t>(r)];
    if (ri.slack)
      ++report.original_ineq_rows;
    else
      ++report.original_eq_rows;
  }

  const int n_slacks = report.original_ineq_rows;
  const int n = n0 + n_slacks;
  report.slacks_added = n_slacks;

  // Bounds: default [0, +inf), sequential overrides.
  qp::Vector l = qp::Vector::Zero(n);
  qp::Vector u = qp::Vector::Constant(n, kInf);
  for (const auto& b : file.bounds) {
    const auto j = static_cast<Eigen::Index>(b.col);
    switch (b.type) {
      case BoundType::Lower: l[j] = b.value; break;
      case BoundType::Upper: u[j] = b.value; break;
      case BoundType::Fixed: l[j] = u[j] = b.value; break;
      case BoundType::Free: l[j] = -kInf; u[j] = kInf; break;
      case BoundType::MinusInfinity: l[j] = -kInf; break;
      case BoundType::PlusInfinity: u[j] = kInf; break;
    }
    ++report.bound_translations;
  }
  for (int j = 0; j < n0; ++j)
    if (l[j] > u[j])
      throw InfeasibleBounds("contradictory bounds on column '" +
                             file.columns[static_cast<size_t>(j)] + "'");

  // Objective vector, constant and matrices.
  qp::Vector c = qp::Vector::Zero(n);
  qp::Vector b_vec = qp::Vector::Zero(m);
  std::vector<linalg::Triplet> a_entries;
  a_entries.reserve(file.entries.size() + static_cast<size_t>(n_slacks));
  for (const auto& e : file.entries) {
    if (e.row == file.objective_row) {
      c[e.col] += e.value;
    } else {
      const RowInfo& ri = info[static_cast<size_t>(e.row)];
      a_entries.push_back({ri.a_row, e.col, e.value});
    }
  }
  const double obj_rhs = rhs[static_cast<size_t>(file.objective_row)];
  report.objective_constant = obj_rhs == 0.0 ? 0.0 : -obj_rhs;

  int next_slack = n0;
  for (int r = 0; r < n_rows; ++r) {
    const RowInfo& ri = info[static_cast<size_t>(r)];
    if (ri.a_row < 0) continue;
    const double v = rhs[static_cast<size_t>(r)];
    b_vec[ri.a_row] = v;
    if (ri.slack) {
      const int j = next_slack++;
      a_entries.push_back({ri.a_row, j, 1.0});
      l[j] = ri.hi == kInf ? -kInf : v - ri.hi;
      u[j] = ri.lo == -kInf ? kInf : v - ri.lo;
    }
  }

  std::vector<linalg::Triplet> q_entries;
  q_entries.reserve(2 * file.quad.size());
  for (const auto& q : file.quad) {
    const int i = std::max(q.col1, q.col2);
    const int j = std::min(q.col1, q.col2);
    q_entries.push_back({i, j, q.value});
    if (i != j) q_entries.push_back({j, i, q.value});
  }

  qp::QpProblem prob;
  prob.name = file.name;
  prob.q = linalg::SparseMatrix::from_triplets(n, n, std::move(q_entries));
  prob.a = linalg::SparseMatrix::from_triplets(m, n, std::move(a_entries));
  prob.b = std::move(b_vec);
  prob.c = std::move(c);
  prob.l = std::move(l);
  prob.u = std::move(u);
  prob.objective_constant = report.objective_constant;
  prob.validate();
  return {std::move(prob), report};
}

/// Deterministic plain-text dump of a converted problem for golden tests and
/// cross-implementation diffing. Q is emitted as its lower triangle.
inline std::string normalized_dump(const qp::QpProblem& p) {
  std::string out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out += "name " + p.name + "\n";
  out += "m " + std::to_string(p.m()) + "\n";
  out += "n " + std::to_string(p.n()) + "\n";
  out += "obj_const " + num(p.objective_constant) + "\n";

  std::string qbody;
  long qn = 0;
  for (int j = 0; j < p.q.cols(); ++j)
    for (int ptr = p.q.col_ptr()[j]; ptr < p.q.col_ptr()[j + 1]; ++ptr) {
      const int i = p.q.row_idx()[static_cast<size_t>(ptr)];
      if (i < j) continue;
      qbody += std::to_string(i) + " " + std::to_string(j) + " " +
               num(p.q.values()[static_cast<size_t>(ptr)]) + "\n";
      ++qn;
    }
  out += "Q " + std::to_string(qn) + "\n" + qbody;

  out += "A " + std::to_string(p.a.nnz()) + "\n";
  for (int j = 0; j < p.a.cols(); ++j)
    for (int ptr = p.a.col_ptr()[j]; ptr < p.a.col_ptr()[j + 1]; ++ptr)
      out += std::to_string(p.a.row_idx()[static_cast<size_t>(ptr)]) + " " + std::to_string(j) +
             " " + num(p.a.values()[static_cast<size_t>(ptr)]) + "\n";

  auto vec = [&](const char* tag, const qp::Vector& v) {
    out += std::string(tag) + " " + std::to_string(v.size()) + "\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) out += num(v[i]) + "\n";
  };
  vec("b", p.b);
  vec("c", p.c);
  vec("l", p.l);
  vec("u", p.u);
  return out;
}

} // namespace accqp::qps
