#pragma once

#include <string>
#include <vector>

namespace accqp::qps {

enum class RowType { Objective, Equal, LessEqual, GreaterEqual };

enum class BoundType { Upper, Lower, Fixed, Free, MinusInfinity, PlusInfinity };

struct RowRecord {
  RowType type;
  std::string name;
  bool operator==(const RowRecord&) const = default;
};

/// One matrix entry; row/col are indices into rows/columns.
struct EntryRecord {
  int col;
  int row;
  double value;
  bool operator==(const EntryRecord&) const = default;
};

struct RhsRecord {
  int row;
  double value;
  bool operator==(const RhsRecord&) const = default;
};

struct RangeRecord {
  int row;
  double value;
  bool operator==(const RangeRecord&) const = default;
};

struct BoundRecord {
  BoundType type;
  int col;
  double value; ///< unused for Free / MinusInfinity / PlusInfinity
  bool operator==(const BoundRecord&) const = default;
};

/// Lower-triangle entry of Q (objective 1/2 x^T Q x).
struct QuadEntry {
  int col1;
  int col2;
  double value;
  bool operator==(const QuadEntry&) const = default;
};

/// Parsed QPS file with all names resolved to indices.
struct QpsFile {
  std::string name;
  std::vector<RowRecord> rows; ///< declaration order; exactly one Objective row
  int objective_row = -1;
  std::vector<std::string> columns;
  std::vector<EntryRecord> entries;
  std::vector<RhsRecord> rhs;
  std::vector<RangeRecord> ranges;
  std::vector<BoundRecord> bounds;
  std::vector<QuadEntry> quad;
  std::vector<std::string> warnings;

  bool same_content(const QpsFile& o) const {
    return name == o.name && rows == o.rows && objective_row == o.objective_row &&
           columns == o.columns && entries == o.entries && rhs == o.rhs && ranges == o.ranges &&
           bounds == o.bounds && quad == o.quad;
  }
};

} // namespace accqp::qps
