// Copyright 2026 The sslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// CSV output: '#' header comments, one column line, comma-separated rows,
// reals printed with 17 significant digits. Also a reader for the
// per-site signal files the CLI passes between stages.

#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sslab {

inline std::string FormatReal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void Comment(const std::string& text) { out_ << "# " << text << '\n'; }

  void Comments(const std::vector<std::pair<std::string, std::string>>& kv) {
    for (const auto& [k, v] : kv) out_ << "# " << k << " = " << v << '\n';
  }

  void Header(const std::vector<std::string>& columns) {
    columns_ = columns.size();
    WriteFields(columns);
  }

  // A row is built from already-formatted fields; use Cell() to format.
  void Row(const std::vector<std::string>& fields) {
    if (columns_ != 0 && fields.size() != columns_) {
      throw std::logic_error("CsvWriter: row width does not match header");
    }
    WriteFields(fields);
  }

  static std::string Cell(double v) { return FormatReal(v); }
  static std::string Cell(long long v) { return std::to_string(v); }
  static std::string Cell(std::size_t v) { return std::to_string(v); }
  static std::string Cell(int v) { return std::to_string(v); }
  static std::string Cell(const std::string& v) { return v; }
  static std::string Cell(const char* v) { return v; }

 private:
  void WriteFields(const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (k) out_ << ',';
      out_ << fields[k];
    }
    out_ << '\n';
  }

  std::ostream& out_;
  std::size_t columns_ = 0;
};

template <typename... T>
std::vector<std::string> CsvRow(const T&... values) {
  return {CsvWriter::Cell(values)...};
}

// Parsed CSV: header comments as key/value pairs (lines "# key = value"),
// column names, and rows of text cells.
struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  bool HasColumn(const std::string& name) const {
    for (const auto& c : columns) {
      if (c == name) return true;
    }
    return false;
  }

  std::size_t Column(const std::string& name) const {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (columns[k] == name) return k;
    }
    throw std::runtime_error("CSV: missing column '" + name + "'");
  }

  const std::string& Meta(const std::string& key) const {
    const auto it = meta.find(key);
    if (it == meta.end()) throw std::runtime_error("CSV: missing header entry '" + key + "'");
    return it->second;
  }

  // Blank cells read as NaN.
  static double Number(const std::string& cell) {
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != cell.size()) throw std::runtime_error("CSV: non-numeric field '" + cell + "'");
    return v;
  }

  std::vector<double> Numbers(const std::string& name) const {
    const std::size_t k = Column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(Number(r[k]));
    return out;
  }

  std::vector<std::string> Texts(const std::string& name) const {
    const std::size_t k = Column(name);
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[k]);
    return out;
  }
};

inline std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string f;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(f);
      f.clear();
    } else {
      f.push_back(c);
    }
  }
  fields.push_back(f);
  return fields;
}

inline CsvTable ReadCsv(std::istream& in) {
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos && line.size() > 2) {
        t.meta[line.substr(2, eq - 2)] = line.substr(eq + 3);
      }
      continue;
    }
    auto fields = SplitCsvLine(line);
    if (t.columns.empty()) {
      t.columns = std::move(fields);
      continue;
    }
    if (fields.size() != t.columns.size()) throw std::runtime_error("CSV: ragged row");
    t.rows.push_back(std::move(fields));
  }
  if (t.columns.empty()) throw std::runtime_error("CSV: no column header");
  return t;
}

inline CsvTable ReadCsvFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return ReadCsv(in);
}

}  // namespace sslab
