#include "copulimp/data_table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "copulimp/errors.hpp"

namespace copulimp {

std::string to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Continuous: return "continuous";
    case ColumnKind::Ordinal: return "ordinal";
    case ColumnKind::Binary: return "binary";
    case ColumnKind::UnitId: return "unit";
    case ColumnKind::TimeId: return "time";
  }
  throw ConfigError("unknown ColumnKind");
}

ColumnKind column_kind_from_string(const std::string& s) {
  if (s == "continuous") return ColumnKind::Continuous;
  if (s == "ordinal") return ColumnKind::Ordinal;
  if (s == "binary") return ColumnKind::Binary;
  if (s == "unit") return ColumnKind::UnitId;
  if (s == "time") return ColumnKind::TimeId;
  throw ConfigError("unknown column kind: \"" + s + "\"");
}

DataTable::DataTable(std::vector<Column> columns)
    : columns_(std::move(columns)) {
  std::unordered_set<std::string> names;
  for (const auto& col : columns_) {
    if (!names.insert(col.name).second) {
      throw DataError("duplicate column name: \"" + col.name + "\"");
    }
  }
  if (!columns_.empty()) {
    const bool id0 = !is_copula_kind(columns_[0].kind);
    n_rows_ = id0 ? columns_[0].labels.size() : columns_[0].values.size();
  }
  for (const auto& col : columns_) {
    if (is_copula_kind(col.kind)) {
      if (col.values.size() != n_rows_ || col.missing.size() != n_rows_) {
        throw DataError("column \"" + col.name + "\" is ragged");
      }
      bool any_observed = false;
      for (std::size_t i = 0; i < n_rows_; ++i) {
        if (col.missing[i]) continue;
        any_observed = true;
        if (!std::isfinite(col.values[i])) {
          throw DataError("column \"" + col.name +
                          "\" has a non-finite observed value");
        }
      }
      if (!any_observed && n_rows_ > 0) {
        throw DataError("column \"" + col.name + "\" is entirely missing");
      }
    } else {
      if (col.labels.size() != n_rows_) {
        throw DataError("identifier column \"" + col.name + "\" is ragged");
      }
    }
  }
}

std::size_t DataTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].name == name) return j;
  }
  throw DataError("no column named \"" + name + "\"");
}

bool DataTable::has_column(const std::string& name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.name == name; });
}

std::vector<std::size_t> DataTable::copula_columns() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (is_copula_kind(columns_[j].kind)) out.push_back(j);
  }
  return out;
}

namespace {
std::size_t find_kind(const std::vector<Column>& cols, ColumnKind kind,
                      const char* what) {
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].kind == kind) return j;
  }
  throw DataError(std::string("table has no ") + what + " column");
}
}  // namespace

std::size_t DataTable::unit_column() const {
  return find_kind(columns_, ColumnKind::UnitId, "unit identifier");
}

std::size_t DataTable::time_column() const {
  return find_kind(columns_, ColumnKind::TimeId, "time identifier");
}

DataTable DataTable::with_value(std::size_t i, std::size_t j, double v) const {
  std::vector<Column> cols = columns_;
  cols[j].values[i] = v;
  cols[j].missing[i] = 0;
  return DataTable(std::move(cols));
}

MissingMask MissingMask::of(const DataTable& table) {
  MissingMask mask;
  mask.n_rows = table.n_rows();
  mask.n_cols = table.n_cols();
  mask.mask.assign(mask.n_rows * mask.n_cols, 0);
  for (std::size_t j = 0; j < mask.n_cols; ++j) {
    if (!is_copula_kind(table.column(j).kind)) continue;
    for (std::size_t i = 0; i < mask.n_rows; ++i) {
      if (table.is_missing(i, j)) mask.mask[i * mask.n_cols + j] = 1;
    }
  }
  return mask;
}

ColumnRanks compute_ranks(const DataTable& table, std::size_t j) {
  const Column& col = table.column(j);
  if (!is_copula_kind(col.kind)) {
    throw DataError("compute_ranks: column \"" + col.name +
                    "\" is an identifier");
  }
  std::set<double> distinct;
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    if (!col.missing[i]) distinct.insert(col.values[i]);
  }
  if (distinct.size() < 2) {
    throw DataError("compute_ranks: column \"" + col.name +
                    "\" has fewer than 2 distinct observed values");
  }
  ColumnRanks ranks;
  ranks.distinct.assign(distinct.begin(), distinct.end());
  ranks.level.assign(table.n_rows(), -1);
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    if (col.missing[i]) continue;
    auto it = std::lower_bound(ranks.distinct.begin(), ranks.distinct.end(),
                               col.values[i]);
    ranks.level[i] = static_cast<int>(it - ranks.distinct.begin());
    ++ranks.n_observed;
  }
  return ranks;
}

DataTable add_lags(const DataTable& table, int k,
                   const std::vector<std::string>& exclude) {
  if (k < 1) throw ConfigError("add_lags: k must be >= 1");
  const std::size_t uj = table.unit_column();
  const std::size_t tj = table.time_column();
  const std::size_t n = table.n_rows();

  // Time labels ordered numerically within each unit.
  std::unordered_map<std::string, std::map<double, std::size_t>> by_unit;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& unit = table.column(uj).labels[i];
    const std::string& tlab = table.column(tj).labels[i];
    double t;
    try {
      t = std::stod(tlab);
    } catch (const std::exception&) {
      throw DataError("add_lags: time label \"" + tlab + "\" is not numeric");
    }
    if (!by_unit[unit].emplace(t, i).second) {
      throw DataError("add_lags: duplicate (unit, time) pair (" + unit + ", " +
                      tlab + ")");
    }
  }

  std::vector<Column> cols = table.columns();
  const std::unordered_set<std::string> skip(exclude.begin(), exclude.end());
  for (std::size_t j = 0; j < table.n_cols(); ++j) {
    const Column& src = table.column(j);
    if (!is_copula_kind(src.kind) || skip.count(src.name)) continue;
    for (int lag = 1; lag <= k; ++lag) {
      Column lagged;
      lagged.name = src.name + "_lag" + std::to_string(lag);
      lagged.kind = src.kind;
      lagged.values.assign(n, 0.0);
      lagged.missing.assign(n, 1);
      for (const auto& [unit, times] : by_unit) {
        // Pair each row with the row `lag` positions earlier in the
        // unit's time order.
        std::vector<std::size_t> order;
        order.reserve(times.size());
        for (const auto& [t, row] : times) order.push_back(row);
        for (std::size_t pos = static_cast<std::size_t>(lag);
             pos < order.size(); ++pos) {
          const std::size_t row = order[pos];
          const std::size_t prev = order[pos - static_cast<std::size_t>(lag)];
          if (!src.missing[prev]) {
            lagged.values[row] = src.values[prev];
            lagged.missing[row] = 0;
          }
        }
      }
      cols.push_back(std::move(lagged));
    }
  }
  return DataTable(std::move(cols));
}

}  // namespace copulimp
