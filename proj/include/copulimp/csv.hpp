#pragma once

#include <map>
#include <string>
#include <vector>

#include "copulimp/data_table.hpp"

namespace copulimp {

using Schema = std::map<std::string, ColumnKind>;

// Schema JSON: object mapping column name -> kind string
// ("continuous" | "ordinal" | "binary" | "unit" | "time").
Schema load_schema(const std::string& path);

struct CsvOptions {
  std::vector<std::string> missing_tokens{"", "NA"};
};

// RFC-4180-style reader: mandatory header row, quoted fields, UTF-8.
// Cells matching a missing token become MISSING. Throws DataError on
// ragged rows, unparseable numerics, schema mismatch, duplicate header
// names, or all-missing data columns.
DataTable read_csv(const std::string& path, const Schema& schema,
                   const CsvOptions& opts = {});

void write_csv(const DataTable& table, const std::string& path,
               const std::string& missing_token = "NA");

}  // namespace copulimp
