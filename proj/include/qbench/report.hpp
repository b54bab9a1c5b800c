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

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qbench {

inline constexpr const char* kVersion = "0.1.0";

/// Minimal CSV table: one header row, fields free of commas/newlines/quotes.
/// Every CSV the tool writes parses back through csv_from_string unchanged.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// %.17g: shortest fixed-precision form that round-trips any double exactly.
std::string fmt_double(double x);

/// Strict full-string parse; anything else raises DataFormatError.
double parse_double(const std::string& field);

std::string csv_to_string(const Csv& table);
Csv csv_from_string(const std::string& text);

void write_csv_file(const std::string& path, const Csv& table);
Csv read_csv_file(const std::string& path);

/// Serialize with a trailing newline; key order is sorted by the JSON
/// library, so identical content is byte-identical on disk.
void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);

}  // namespace qbench
