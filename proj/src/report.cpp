// Copyright 2026 The qbench Authors
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

#include "qbench/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "qbench/circuit.hpp"
#include "qbench/errors.hpp"

namespace qbench {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_double(const std::string& field) {
  if (field.empty()) throw DataFormatError("empty numeric CSV field");
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size()) {
    throw DataFormatError("bad numeric CSV field: '" + field + "'");
  }
  return v;
}

namespace {

void check_field(const std::string& f) {
  if (f.find_first_of(",\n\r\"") != std::string::npos) {
    throw DataFormatError("CSV field contains a delimiter: '" + f + "'");
  }
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string csv_to_string(const Csv& table) {
  if (table.header.empty()) throw DataFormatError("CSV without header");
  std::ostringstream out;
  const auto emit = [&](const std::vector<std::string>& row) {
    if (row.size() != table.header.size()) {
      throw DataFormatError("CSV row width differs from header");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      check_field(row[i]);
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& row : table.rows) emit(row);
  return out.str();
}

Csv csv_from_string(const std::string& text) {
  Csv table;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_line(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
    } else {
      if (fields.size() != table.header.size()) {
        throw DataFormatError("CSV row width differs from header");
      }
      table.rows.push_back(std::move(fields));
    }
  }
  if (table.header.empty()) throw DataFormatError("CSV without header");
  return table;
}

void write_csv_file(const std::string& path, const Csv& table) {
  write_text_file(path, csv_to_string(table));
}

Csv read_csv_file(const std::string& path) {
  return csv_from_string(read_text_file(path));
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataFormatError(path + ": " + e.what());
  }
}

}  // namespace qbench
