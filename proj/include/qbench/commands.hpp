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

#include "qbench/scenario.hpp"

namespace qbench {

struct CmdResult {
  nlohmann::json report;
  std::vector<std::string> files;  // every path written, report.json last
};

/// Pipeline drivers. Each requires its scenario section, writes plot-ready
/// artifacts plus report.json under out_dir (created if needed), and returns
/// the report. Reports carry seed + config hash but no timestamps, so equal
/// inputs produce byte-identical outputs. circuits/records paths switch a
/// command into fit-only mode on external data; give both or neither.
CmdResult cmd_drb(const Scenario& s, const std::string& out_dir,
                  const std::string& circuits_path = "",
                  const std::string& records_path = "");

CmdResult cmd_gst(const Scenario& s, const std::string& out_dir,
                  const std::string& circuits_path = "",
                  const std::string& records_path = "");

CmdResult cmd_calibrate(const Scenario& s, const std::string& out_dir,
                        const std::string& circuits_path = "",
                        const std::string& records_path = "");

CmdResult cmd_array(const Scenario& s, const std::string& out_dir);

}  // namespace qbench
