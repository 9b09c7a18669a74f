#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace copulimp {

enum class ColumnKind { Continuous, Ordinal, Binary, UnitId, TimeId };

std::string to_string(ColumnKind kind);
ColumnKind column_kind_from_string(const std::string& s);

// True for columns that enter the copula (everything except identifiers).
inline bool is_copula_kind(ColumnKind k) {
  return k == ColumnKind::Continuous || k == ColumnKind::Ordinal ||
         k == ColumnKind::Binary;
}

// One column of a DataTable. Identifier columns carry opaque string
// labels; data columns carry finite numeric values with a missingness
// flag. A cell is either finite or missing, never NaN/inf.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<double> values;        // data columns; undefined where missing
  std::vector<std::uint8_t> missing; // 1 = MISSING
  std::vector<std::string> labels;   // identifier columns only
};

class DataTable {
 public:
  DataTable() = default;

  // Throws DataError on duplicate names, ragged columns, or non-finite
  // observed payloads.
  explicit DataTable(std::vector<Column> columns);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }

  const Column& column(std::size_t j) const { return columns_[j]; }
  const std::vector<Column>& columns() const { return columns_; }

  // Index of the named column; throws DataError if absent.
  std::size_t column_index(const std::string& name) const;
  bool has_column(const std::string& name) const;

  bool is_missing(std::size_t i, std::size_t j) const {
    return columns_[j].missing[i] != 0;
  }
  double value(std::size_t i, std::size_t j) const {
    return columns_[j].values[i];
  }

  // Indices of columns that participate in the copula.
  std::vector<std::size_t> copula_columns() const;

  // Index of the unique UnitId / TimeId column; throws DataError when
  // the table has none.
  std::size_t unit_column() const;
  std::size_t time_column() const;

  DataTable with_value(std::size_t i, std::size_t j, double v) const;

 private:
  std::vector<Column> columns_;
  std::size_t n_rows_ = 0;
};

// n x p boolean view of a table's missingness, row-major.
struct MissingMask {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::uint8_t> mask;

  bool at(std::size_t i, std::size_t j) const { return mask[i * n_cols + j] != 0; }
  static MissingMask of(const DataTable& table);
};

// Tie-grouped rank structure of a single column. Levels are a bijection
// with the sorted distinct observed values.
struct ColumnRanks {
  std::vector<double> distinct;  // sorted distinct observed values
  std::vector<int> level;        // per row; -1 where missing
  std::size_t n_observed = 0;
};

// Throws DataError when the column is an identifier or has fewer than
// two distinct observed values.
ColumnRanks compute_ranks(const DataTable& table, std::size_t j);

// Appends v_lag1..v_lagk for every data column not in `exclude`. Lags
// never cross unit boundaries; cells before a unit's first period are
// MISSING. Requires UnitId and TimeId columns and unique (unit, time)
// pairs; time labels must parse as numbers for ordering.
DataTable add_lags(const DataTable& table, int k,
                   const std::vector<std::string>& exclude = {});

}  // namespace copulimp
