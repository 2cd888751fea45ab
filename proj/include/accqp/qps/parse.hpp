#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "accqp/errors.hpp"
#include "accqp/qps/file.hpp"

namespace accqp::qps {

struct ParseOptions {
  /// Error on QUADOBJ entries above the diagonal instead of mirroring them.
  bool strict_quadobj = false;
};

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_number(const std::string& tok, long line_no) {
  std::string t = tok;
  for (char& ch : t)
    if (ch == 'D' || ch == 'd') ch = 'E'; // Fortran exponent marker
  const char* begin = t.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') throw ParseError("malformed number '" + tok + "'", line_no);
  return v;
}

} // namespace detail

/// Tolerant free-format QPS/MPS parser. Section keywords start in column 1,
/// data lines are whitespace-split. Duplicate matrix entries are kept and
/// summed downstream. Extra N rows are ignored with a warning.
inline QpsFile parse_qps(std::istream& in, const ParseOptions& options = {}) {
  QpsFile file;
  std::unordered_map<std::string, int> row_index;
  std::unordered_map<std::string, int> ignored_rows;
  std::unordered_map<std::string, int> col_index;

  enum class Section { None, Rows, Columns, Rhs, Ranges, Bounds, QuadObj, Done };
  Section section = Section::None;

  std::string line;
  long line_no = 0;
  bool saw_name = false;

  auto resolve_col = [&](const std::string& name, long ln) {
    auto it = col_index.find(name);
    if (it == col_index.end()) throw ParseError("unresolved column '" + name + "'", ln);
    return it->second;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '*') continue;

    const bool header = !std::isspace(static_cast<unsigned char>(line[0]));
    auto tokens = detail::tokenize(line);
    if (tokens.empty()) continue;

    if (header) {
      const std::string& kw = tokens[0];
      if (kw == "NAME") {
        file.name = tokens.size() > 1 ? tokens[1] : "";
        saw_name = true;
      } else if (kw == "ROWS") {
        section = Section::Rows;
      } else if (kw == "COLUMNS") {
        section = Section::Columns;
      } else if (kw == "RHS") {
        section = Section::Rhs;
      } else if (kw == "RANGES") {
        section = Section::Ranges;
      } else if (kw == "BOUNDS") {
        section = Section::Bounds;
      } else if (kw == "QUADOBJ") {
        section = Section::QuadObj;
      } else if (kw == "ENDATA") {
        section = Section::Done;
        break;
      } else {
        throw ParseError("unknown section '" + kw + "'", line_no);
      }
      continue;
    }

    switch (section) {
      case Section::Rows: {
        if (tokens.size() != 2) throw ParseError("ROWS line needs 'type name'", line_no);
        const std::string& t = tokens[0];
        const std::string& name = tokens[1];
        if (row_index.count(name) || ignored_rows.count(name))
          throw ParseError("duplicate row '" + name + "'", line_no);
        RowType type;
        if (t == "N") {
          if (file.objective_row >= 0) {
            ignored_rows.emplace(name, 0);
            file.warnings.push_back("ignoring extra objective row '" + name + "'");
            continue;
          }
          type = RowType::Objective;
        } else if (t == "E") {
          type = RowType::Equal;
        } else if (t == "L") {
          type = RowType::LessEqual;
        } else if (t == "G") {
          type = RowType::GreaterEqual;
        } else {
          throw ParseError("unknown row type '" + t + "'", line_no);
        }
        row_index.emplace(name, static_cast<int>(file.rows.size()));
        if (type == RowType::Objective) file.objective_row = static_cast<int>(file.rows.size());
        file.rows.push_back({type, name});
        break;
      }
      case Section::Columns: {
        if (tokens.size() >= 2 && tokens[1].find("MARKER") != std::string::npos)
          throw ParseError("integer markers are not supported", line_no);
        if (tokens.size() < 3 || tokens.size() % 2 == 0)
          throw ParseError("COLUMNS line needs 'col row value [row value]'", line_no);
        const std::string& col_name = tokens[0];
        int col;
        if (auto it = col_index.find(col_name); it != col_index.end()) {
          col = it->second;
        } else {
          col = static_cast<int>(file.columns.size());
          col_index.emplace(col_name, col);
          file.columns.push_back(col_name);
        }
        for (size_t i = 1; i + 1 < tokens.size(); i += 2) {
          const std::string& row_name = tokens[i];
          const double v = detail::parse_number(tokens[i + 1], line_no);
          if (ignored_rows.count(row_name)) continue;
          auto it = row_index.find(row_name);
          if (it == row_index.end())
            throw ParseError("unresolved row '" + row_name + "'", line_no);
          file.entries.push_back({col, it->second, v});
        }
        break;
      }
      case Section::Rhs:
      case Section::Ranges: {
        size_t i = tokens.size() % 2 == 1 ? 1 : 0; // leading set name when present
        if (tokens.size() - i < 2) throw ParseError("RHS/RANGES line too short", line_no);
        for (; i + 1 < tokens.size(); i += 2) {
          const std::string& row_name = tokens[i];
          const double v = detail::parse_number(tokens[i + 1], line_no);
          if (ignored_rows.count(row_name)) continue;
          auto it = row_index.find(row_name);
          if (it == row_index.end())
            throw ParseError("unresolved row '" + row_name + "'", line_no);
          if (section == Section::Rhs) {
            file.rhs.push_back({it->second, v});
          } else {
            if (file.rows[static_cast<size_t>(it->second)].type == RowType::Objective)
              throw ParseError("RANGES entry on objective row '" + row_name + "'", line_no);
            file.ranges.push_back({it->second, v});
          }
        }
        break;
      }
      case Section::Bounds: {
        const std::string& t = tokens[0];
        BoundType type;
        bool has_value = true;
        if (t == "UP") type = BoundType::Upper;
        else if (t == "LO") type = BoundType::Lower;
        else if (t == "FX") type = BoundType::Fixed;
        else if (t == "FR") { type = BoundType::Free; has_value = false; }
        else if (t == "MI") { type = BoundType::MinusInfinity; has_value = false; }
        else if (t == "PL") { type = BoundType::PlusInfinity; has_value = false; }
        else if (t == "BV" || t == "LI" || t == "UI")
          throw ParseError("integer bound type '" + t + "' is not supported", line_no);
        else
          throw ParseError("unknown bound type '" + t + "'", line_no);
        if (has_value) {
          if (tokens.size() < 3) throw ParseError("bound line too short", line_no);
          const int col = resolve_col(tokens[tokens.size() - 2], line_no);
          const double v = detail::parse_number(tokens.back(), line_no);
          file.bounds.push_back({type, col, v});
        } else {
          if (tokens.size() < 2) throw ParseError("bound line too short", line_no);
          const int col = resolve_col(tokens.back(), line_no);
          file.bounds.push_back({type, col, 0.0});
        }
        break;
      }
      case Section::QuadObj: {
        if (tokens.size() != 3) throw ParseError("QUADOBJ line needs 'col col value'", line_no);
        const int c1 = resolve_col(tokens[0], line_no);
        const int c2 = resolve_col(tokens[1], line_no);
        const double v = detail::parse_number(tokens[2], line_no);
        if (options.strict_quadobj && c1 < c2)
          throw ParseError("QUADOBJ entry above the diagonal", line_no);
        file.quad.push_back({c1, c2, v});
        break;
      }
      case Section::None:
        throw ParseError("data line before any section", line_no);
      case Section::Done:
        break;
    }
  }

  if (!saw_name && file.rows.empty()) throw ParseError("empty input", line_no);
  if (file.objective_row < 0) throw ParseError("no objective (N) row", line_no);
  return file;
}

inline QpsFile parse_qps_string(const std::string& text, const ParseOptions& options = {}) {
  std::istringstream in(text);
  return parse_qps(in, options);
}

inline QpsFile parse_qps_path(const std::string& path, const ParseOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_qps(in, options);
}

/// Writes the internal representation back out as QPS text. Numbers use %.17g
/// so a parse -> serialize -> parse round trip is exact.
inline std::string serialize_qps(const QpsFile& file) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::string out;
  out += "NAME          " + file.name + "\n";
  out += "ROWS\n";
  for (const auto& r : file.rows) {
    const char* t = r.type == RowType::Objective  ? "N"
                    : r.type == RowType::Equal    ? "E"
                    : r.type == RowType::LessEqual ? "L"
                                                   : "G";
    out += std::string(" ") + t + "  " + r.name + "\n";
  }
  out += "COLUMNS\n";
  for (const auto& e : file.entries)
    out += "    " + file.columns[static_cast<size_t>(e.col)] + "  " +
           file.rows[static_cast<size_t>(e.row)].name + "  " + num(e.value) + "\n";
  out += "RHS\n";
  for (const auto& r : file.rhs)
    out += "    RHS  " + file.rows[static_cast<size_t>(r.row)].name + "  " + num(r.value) + "\n";
  if (!file.ranges.empty()) {
    out += "RANGES\n";
    for (const auto& r : file.ranges)
      out += "    RNG  " + file.rows[static_cast<size_t>(r.row)].name + "  " + num(r.value) +
             "\n";
  }
  if (!file.bounds.empty()) {
    out += "BOUNDS\n";
    for (const auto& b : file.bounds) {
      const char* t = b.type == BoundType::Upper           ? "UP"
                      : b.type == BoundType::Lower         ? "LO"
                      : b.type == BoundType::Fixed         ? "FX"
                      : b.type == BoundType::Free          ? "FR"
                      : b.type == BoundType::MinusInfinity ? "MI"
                                                           : "PL";
      out += std::string(" ") + t + " BND  " + file.columns[static_cast<size_t>(b.col)];
      if (b.type == BoundType::Upper || b.type == BoundType::Lower || b.type == BoundType::Fixed)
        out += "  " + num(b.value);
      out += "\n";
    }
  }
  if (!file.quad.empty()) {
    out += "QUADOBJ\n";
    for (const auto& q : file.quad)
      out += "    " + file.columns[static_cast<size_t>(q.col1)] + "  " +
             file.columns[static_cast<size_t>(q.col2)] + "  " + num(q.value) + "\n";
  }
  out += "ENDATA\n";
  return out;
}

} // namespace accqp::qps
