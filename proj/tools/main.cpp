// Copyright 2026 The fiberqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Everything below talks to the library through its
// C interface only.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fiberqc.h"

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  std::string preset;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("-c,--config", args->config_path,
                  "experiment config file (INI)");
  cmd->add_option("-s,--set", args->overrides,
                  "override, section.key=value (repeatable)");
  cmd->add_option("-o,--out", args->out_dir, "output directory");
  cmd->add_option("--preset", args->preset,
                  "named default set, e.g. benchtop");
}

/// Builds the config handle from the file plus overrides. Returns nullptr
/// after printing the error.
fqc_config* build_config(const CommonArgs& args) {
  fqc_config* config = nullptr;
  fqc_status status = args.config_path.empty()
                          ? fqc_config_create(&config)
                          : fqc_config_load(args.config_path.c_str(), &config);
  if (status != FQC_OK) {
    std::fprintf(stderr, "error (%s): %s\n", fqc_status_name(status),
                 fqc_last_error());
    return nullptr;
  }
  for (const auto& assignment : args.overrides) {
    status = fqc_config_set(config, assignment.c_str());
    if (status != FQC_OK) {
      std::fprintf(stderr, "error (%s): %s\n", fqc_status_name(status),
                   fqc_last_error());
      fqc_config_destroy(config);
      return nullptr;
    }
  }
  return config;
}

int finish(fqc_status status) {
  if (status == FQC_OK) return 0;
  std::fprintf(stderr, "error (%s): %s\n", fqc_status_name(status),
               fqc_last_error());
  return status == FQC_ERR_INVALID_CONFIG ? 2 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fiberqc: multimode-fiber photonic circuit simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fqc_version()));

  CommonArgs measure_args;
  CLI::App* measure =
      app.add_subcommand("measure-tm",
                         "reconstruct the transmission matrices by "
                         "phase-stepping interferometry");
  add_common(measure, &measure_args);

  CommonArgs run_args;
  std::string subcommand;
  CLI::App* run = app.add_subcommand(
      "run", "run a programmed-circuit experiment end to end");
  run->add_option("subcommand", subcommand,
                  "hom | sylvester | random-study | calibrate-crosstalk | "
                  "localize")
      ->required();
  add_common(run, &run_args);

  // Frequently used knobs as first-class flags (sugar for --set).
  std::int64_t n_det = -1;
  std::int64_t trials = -1;
  std::string detectors, delays;
  run->add_option("--n-det", n_det, "operator size (run.n_det)");
  run->add_option("--trials", trials, "trials per size (study.trials)");
  run->add_option("--detectors", detectors,
                  "comma list of sizes (study.detectors)");
  run->add_option("--delays", delays,
                  "comma list of source delays in seconds (hom.delays)");

  CLI11_PARSE(app, argc, argv);

  CommonArgs& args = measure->parsed() ? measure_args : run_args;
  if (run->parsed()) {
    if (n_det >= 0)
      args.overrides.push_back("run.n_det=" + std::to_string(n_det));
    if (trials >= 0)
      args.overrides.push_back("study.trials=" + std::to_string(trials));
    if (!detectors.empty())
      args.overrides.push_back("study.detectors=" + detectors);
    if (!delays.empty()) args.overrides.push_back("hom.delays=" + delays);
  }
  if (!args.preset.empty())
    args.overrides.insert(args.overrides.begin(), "preset=" + args.preset);

  fqc_config* config = build_config(args);
  if (config == nullptr) return 2;

  fqc_status status = FQC_OK;
  if (measure->parsed()) {
    status = fqc_measure_tm(config, args.out_dir.c_str());
  } else {
    status = fqc_run(config, subcommand.c_str(), args.out_dir.c_str());
  }
  fqc_config_destroy(config);
  return finish(status);
}
