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

#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "qbench/commands.hpp"
#include "qbench/errors.hpp"
#include "qbench/parallel.hpp"

namespace {

struct CommonOpts {
  std::string scenario_path;
  std::string out_dir = "out";
  std::string circuits;
  std::string records;
  std::int64_t seed = -1;  // negative: keep the scenario's seed
  int jobs = 0;
  bool serial = false;
};

void add_common(CLI::App* cmd, CommonOpts* o, bool fit_only) {
  cmd->add_option("scenario", o->scenario_path, "Scenario JSON file")
      ->required();
  cmd->add_option("--out", o->out_dir, "Output directory (default: out)");
  cmd->add_option("--seed", o->seed, "Override the scenario master seed");
  cmd->add_option("--jobs", o->jobs, "Worker threads (0 = OpenMP default)");
  cmd->add_flag("--serial", o->serial,
                "Use the serial reference kernels instead of OpenMP");
  if (fit_only) {
    cmd->add_option("--circuits", o->circuits,
                    "Fit-only mode: externally produced circuits JSON");
    cmd->add_option("--records", o->records,
                    "Fit-only mode: externally produced records JSON");
  }
}

int run_command(
    const CommonOpts& o,
    const std::function<qbench::CmdResult(const qbench::Scenario&)>& fn) {
  if (o.jobs > 0) qbench::par::set_threads(o.jobs);
  if (o.serial) qbench::par::set_policy(qbench::par::Policy::Serial);
  qbench::Scenario s = qbench::load_scenario(o.scenario_path);
  if (o.seed >= 0) s.seed = static_cast<std::uint64_t>(o.seed);
  const qbench::CmdResult result = fn(s);
  std::printf("%s\n", result.report.at("summary").get<std::string>().c_str());
  if (result.report.contains("results") &&
      result.report.at("results").contains("corrections")) {
    std::printf("%s\n",
                result.report.at("results").at("corrections").dump(2).c_str());
  }
  for (const std::string& f : result.files) {
    std::printf("wrote %s\n", f.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qbench: DRB / GST simulation and analysis for single-qubit "
               "gate sets"};
  app.require_subcommand(1);

  CommonOpts drb_o, gst_o, cal_o, arr_o;
  CLI::App* drb =
      app.add_subcommand("drb", "Direct randomized benchmarking pipeline");
  add_common(drb, &drb_o, true);
  CLI::App* gst = app.add_subcommand("gst", "Gate set tomography pipeline");
  add_common(gst, &gst_o, true);
  CLI::App* cal = app.add_subcommand(
      "calibrate", "Two-parameter coherent-error calibration scan");
  add_common(cal, &cal_o, true);
  CLI::App* arr =
      app.add_subcommand("array", "Independent-site array benchmarking");
  add_common(arr, &arr_o, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (drb->parsed()) {
      return run_command(drb_o, [&](const qbench::Scenario& s) {
        return qbench::cmd_drb(s, drb_o.out_dir, drb_o.circuits,
                               drb_o.records);
      });
    }
    if (gst->parsed()) {
      return run_command(gst_o, [&](const qbench::Scenario& s) {
        return qbench::cmd_gst(s, gst_o.out_dir, gst_o.circuits,
                               gst_o.records);
      });
    }
    if (cal->parsed()) {
      return run_command(cal_o, [&](const qbench::Scenario& s) {
        return qbench::cmd_calibrate(s, cal_o.out_dir, cal_o.circuits,
                                     cal_o.records);
      });
    }
    if (arr->parsed()) {
      return run_command(arr_o, [&](const qbench::Scenario& s) {
        return qbench::cmd_array(s, arr_o.out_dir);
      });
    }
  } catch (const qbench::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qbench::DataFormatError& e) {
    std::fprintf(stderr, "data format error: %s\n", e.what());
    return 4;
  } catch (const qbench::Error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
