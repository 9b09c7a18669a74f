#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "copulimp/csv.hpp"
#include "copulimp/data_table.hpp"
#include "copulimp/errors.hpp"
#include "copulimp/rng.hpp"

using namespace copulimp;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name)
      : path("/tmp/copulimp_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
  void write(const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
  }
};

DataTable small_panel(int units, int periods, Rng& rng) {
  Column unit{"unit", ColumnKind::UnitId, {}, {}, {}};
  Column time{"time", ColumnKind::TimeId, {}, {}, {}};
  Column x{"x", ColumnKind::Continuous, {}, {}, {}};
  Column y{"y", ColumnKind::Continuous, {}, {}, {}};
  for (int u = 0; u < units; ++u) {
    for (int t = 0; t < periods; ++t) {
      unit.labels.push_back("u" + std::to_string(u));
      time.labels.push_back(std::to_string(t + 1));
      x.values.push_back(rng.normal());
      x.missing.push_back(0);
      y.values.push_back(rng.normal());
      y.missing.push_back(0);
    }
  }
  return DataTable({unit, time, x, y});
}

}  // namespace

TEST_CASE("read_csv parses missing tokens") {
  TempFile f("basic.csv");
  f.write("unit,a,b\nu1,1.5,2\nu2,NA,3\nu3,2.5,4\n");
  Schema schema{{"unit", ColumnKind::UnitId},
                {"a", ColumnKind::Continuous},
                {"b", ColumnKind::Continuous}};
  DataTable table = read_csv(f.path, schema);
  CHECK(table.n_rows() == 3);
  int missing = 0;
  for (std::size_t j : table.copula_columns()) {
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
      if (table.is_missing(i, j)) ++missing;
    }
  }
  CHECK(missing == 1);
  CHECK(table.is_missing(1, table.column_index("a")));
}

TEST_CASE("read_csv rejects duplicate header names") {
  TempFile f("dup.csv");
  f.write("a,a\n1,2\n");
  Schema schema{{"a", ColumnKind::Continuous}};
  CHECK_THROWS_AS(read_csv(f.path, schema), DataError);
}

TEST_CASE("read_csv rejects ragged rows and bad numerics") {
  Schema schema{{"a", ColumnKind::Continuous}, {"b", ColumnKind::Continuous}};
  {
    TempFile f("ragged.csv");
    f.write("a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(f.path, schema), DataError);
  }
  {
    TempFile f("badnum.csv");
    f.write("a,b\n1,zebra\n3,4\n");
    CHECK_THROWS_AS(read_csv(f.path, schema), DataError);
  }
}

TEST_CASE("read_csv rejects all-missing columns") {
  TempFile f("allmiss.csv");
  f.write("a,b\n1,NA\n2,\n");
  Schema schema{{"a", ColumnKind::Continuous}, {"b", ColumnKind::Continuous}};
  CHECK_THROWS_AS(read_csv(f.path, schema), DataError);
}

TEST_CASE("csv round-trip matches an independent parser") {
  // 100-row fixture: write, read back, compare cell-by-cell against a
  // plain line splitter on the same file.
  Rng rng(11);
  TempFile f("roundtrip.csv");
  {
    std::ostringstream out;
    out << "id,v,w\n";
    for (int i = 0; i < 100; ++i) {
      out << "r" << i << ",";
      if (i % 7 == 0) out << "NA";
      else out << rng.normal();
      out << "," << (i % 3);
      out << "\n";
    }
    f.write(out.str());
  }
  Schema schema{{"id", ColumnKind::UnitId},
                {"v", ColumnKind::Continuous},
                {"w", ColumnKind::Ordinal}};
  DataTable table = read_csv(f.path, schema);

  TempFile g("roundtrip_out.csv");
  write_csv(table, g.path);
  DataTable again = read_csv(g.path, schema);
  REQUIRE(again.n_rows() == table.n_rows());
  for (std::size_t j : table.copula_columns()) {
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
      CHECK(again.is_missing(i, j) == table.is_missing(i, j));
      if (!table.is_missing(i, j)) CHECK(again.value(i, j) == table.value(i, j));
    }
  }

  // Independent parse of the original fixture (no quoting used).
  std::ifstream in(f.path);
  std::string line;
  std::getline(in, line);
  std::size_t row = 0;
  const std::size_t jv = table.column_index("v");
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string id, v, w;
    std::getline(fields, id, ',');
    std::getline(fields, v, ',');
    std::getline(fields, w, ',');
    if (v == "NA") {
      CHECK(table.is_missing(row, jv));
    } else {
      CHECK(table.value(row, jv) == std::stod(v));
    }
    ++row;
  }
  CHECK(row == 100);
}

TEST_CASE("compute_ranks groups ties into shared levels") {
  Column c{"c", ColumnKind::Continuous, {3.2, 1.0, 3.2, 7.5}, {0, 0, 0, 0}, {}};
  DataTable table({c});
  ColumnRanks ranks = compute_ranks(table, 0);
  CHECK(ranks.level == std::vector<int>{1, 0, 1, 2});
  CHECK(ranks.distinct == std::vector<double>{1.0, 3.2, 7.5});
}

TEST_CASE("compute_ranks on a binary column has 2 levels") {
  Column c{"b", ColumnKind::Binary, {0, 1, 1, 0}, {0, 0, 0, 0}, {}};
  ColumnRanks ranks = compute_ranks(DataTable({c}), 0);
  CHECK(ranks.distinct.size() == 2);
  CHECK(ranks.level == std::vector<int>{0, 1, 1, 0});
}

TEST_CASE("compute_ranks rejects constant columns") {
  Column c{"c", ColumnKind::Continuous, {2.0, 2.0, 2.0}, {0, 0, 0}, {}};
  CHECK_THROWS_AS(compute_ranks(DataTable({c}), 0), DataError);
}

TEST_CASE("ranks are invariant under strictly increasing transforms") {
  Rng rng(42);
  for (int rep = 0; rep < 20; ++rep) {
    Column c{"c", ColumnKind::Continuous, {}, {}, {}};
    for (int i = 0; i < 50; ++i) {
      c.values.push_back(std::round(rng.normal() * 4.0) / 4.0);  // force ties
      c.missing.push_back(i % 9 == 0);
    }
    Column t = c;
    for (double& v : t.values) v = std::exp(v);
    const ColumnRanks before = compute_ranks(DataTable({c}), 0);
    const ColumnRanks after = compute_ranks(DataTable({t}), 0);
    CHECK(before.level == after.level);
  }
}

TEST_CASE("add_lags shifts within a unit") {
  Column unit{"unit", ColumnKind::UnitId, {}, {}, {"u1", "u1", "u1"}};
  Column time{"time", ColumnKind::TimeId, {}, {}, {"1", "2", "3"}};
  Column v{"v", ColumnKind::Continuous, {10.0, 20.0, 30.0}, {0, 0, 0}, {}};
  DataTable lagged = add_lags(DataTable({unit, time, v}), 1);
  const std::size_t j = lagged.column_index("v_lag1");
  CHECK(lagged.is_missing(0, j));
  CHECK(lagged.value(1, j) == 10.0);
  CHECK(lagged.value(2, j) == 20.0);
  CHECK(lagged.n_rows() == 3);
}

TEST_CASE("add_lags adds k columns per variable and keeps originals") {
  Rng rng(7);
  DataTable panel = small_panel(120, 6, rng);
  // Widen to 5 variables.
  std::vector<Column> cols = panel.columns();
  for (int extra = 0; extra < 3; ++extra) {
    Column c = cols[2];
    c.name = "z" + std::to_string(extra);
    cols.push_back(c);
  }
  DataTable wide(cols);
  DataTable lagged = add_lags(wide, 4);
  CHECK(lagged.n_cols() == wide.n_cols() + 20);  // 4 lags x 5 variables
  CHECK(lagged.n_rows() == wide.n_rows());
  for (std::size_t j = 0; j < wide.n_cols(); ++j) {
    const Column& a = wide.column(j);
    const Column& b = lagged.column(j);
    CHECK(a.name == b.name);
    CHECK(a.values == b.values);
    CHECK(a.missing == b.missing);
    CHECK(a.labels == b.labels);
  }
}

TEST_CASE("lags never cross unit boundaries") {
  Rng rng(13);
  DataTable panel = small_panel(3, 8, rng);
  for (int k = 1; k <= 3; ++k) {
    DataTable lagged = add_lags(panel, k);
    const std::size_t ju = lagged.unit_column();
    for (const char* base : {"x", "y"}) {
      for (int l = 1; l <= k; ++l) {
        const std::size_t j = lagged.column_index(
            std::string(base) + "_lag" + std::to_string(l));
        // Brute force: find each unit's first rows.
        for (std::size_t i = 0; i < lagged.n_rows(); ++i) {
          const std::string& u = lagged.column(ju).labels[i];
          int earlier = 0;
          for (std::size_t r = 0; r < i; ++r) {
            if (lagged.column(ju).labels[r] == u) ++earlier;
          }
          if (earlier < l) CHECK(lagged.is_missing(i, j));
          else CHECK_FALSE(lagged.is_missing(i, j));
        }
      }
    }
  }
}

TEST_CASE("add_lags requires identifiers and unique (unit,time)") {
  Column v{"v", ColumnKind::Continuous, {1.0, 2.0}, {0, 0}, {}};
  CHECK_THROWS_AS(add_lags(DataTable({v}), 1), DataError);

  Column unit{"unit", ColumnKind::UnitId, {}, {}, {"u1", "u1"}};
  Column time{"time", ColumnKind::TimeId, {}, {}, {"1", "1"}};
  CHECK_THROWS_AS(add_lags(DataTable({unit, time, v}), 1), DataError);
}

TEST_CASE("MissingMask agrees with the table cell-for-cell") {
  TempFile f("mask.csv");
  f.write("a,b\n1,NA\n2,3\nNA,4\n");
  Schema schema{{"a", ColumnKind::Continuous}, {"b", ColumnKind::Continuous}};
  DataTable table = read_csv(f.path, schema);
  MissingMask mask = MissingMask::of(table);
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
      CHECK(mask.at(i, j) == table.is_missing(i, j));
    }
  }
}
