#include "copulimp/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "copulimp/errors.hpp"

namespace copulimp {

namespace {

// RFC-4180 record reader: handles quoted fields, embedded commas,
// doubled quotes, and CRLF line endings. Returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // swallow; newline handling below
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote(const std::string& s) {
  if (!needs_quoting(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string format_value(double v) {
  // Shortest representation that round-trips a double.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double parsed = std::strtod(buf, nullptr);
  if (parsed == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char shorter[32];
      std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      if (std::strtod(shorter, nullptr) == v) return shorter;
    }
  }
  return buf;
}

}  // namespace

Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("schema file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("schema must be a JSON object");
  Schema schema;
  for (auto it = j.begin(); it != j.end(); ++it) {
    schema[it.key()] = column_kind_from_string(it.value().get<std::string>());
  }
  return schema;
}

DataTable read_csv(const std::string& path, const Schema& schema,
                   const CsvOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open CSV file: " + path);

  std::vector<std::string> header;
  if (!read_record(in, header) || header.empty()) {
    throw DataError(path + ": missing header row");
  }

  std::vector<Column> cols(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) {
    cols[j].name = header[j];
    auto it = schema.find(header[j]);
    if (it == schema.end()) {
      throw DataError(path + ": schema has no entry for column \"" +
                      header[j] + "\"");
    }
    cols[j].kind = it->second;
  }

  auto is_missing_token = [&](const std::string& s) {
    return std::find(opts.missing_tokens.begin(), opts.missing_tokens.end(),
                     s) != opts.missing_tokens.end();
  };

  std::vector<std::string> fields;
  std::size_t line = 1;
  while (read_record(in, fields)) {
    ++line;
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing newline
    if (fields.size() != header.size()) {
      throw DataError(path + ":" + std::to_string(line) + ": ragged row (" +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()) + ")");
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      Column& col = cols[j];
      if (is_copula_kind(col.kind)) {
        if (is_missing_token(fields[j])) {
          col.values.push_back(0.0);
          col.missing.push_back(1);
        } else {
          char* end = nullptr;
          const double v = std::strtod(fields[j].c_str(), &end);
          if (end == fields[j].c_str() || *end != '\0' || !std::isfinite(v)) {
            throw DataError(path + ":" + std::to_string(line) +
                            ": unparseable numeric cell \"" + fields[j] +
                            "\" in column \"" + col.name + "\"");
          }
          col.values.push_back(v);
          col.missing.push_back(0);
        }
      } else {
        col.labels.push_back(fields[j]);
      }
    }
  }
  return DataTable(std::move(cols));
}

void write_csv(const DataTable& table, const std::string& path,
               const std::string& missing_token) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  for (std::size_t j = 0; j < table.n_cols(); ++j) {
    if (j) out << ',';
    out << quote(table.column(j).name);
  }
  out << '\n';
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
      if (j) out << ',';
      const Column& col = table.column(j);
      if (is_copula_kind(col.kind)) {
        if (col.missing[i]) out << missing_token;
        else out << format_value(col.values[i]);
      } else {
        out << quote(col.labels[i]);
      }
    }
    out << '\n';
  }
}

}  // namespace copulimp
