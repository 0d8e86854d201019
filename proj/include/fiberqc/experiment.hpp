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

#ifndef FIBERQC_EXPERIMENT_HPP
#define FIBERQC_EXPERIMENT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fiberqc/metrics.hpp"
#include "fiberqc/presets.hpp"

namespace fiberqc {

/// Parsed INI-style experiment configuration. Keys are addressed as
/// "section.key"; a top-level `preset = benchtop` line switches every
/// default to the frozen benchtop noise preset before file values apply.
struct ExperimentConfig {
  std::map<std::string, std::string> values;

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_text(const std::string& text);

  /// Applies a "section.key=value" override (CLI --set).
  void set(const std::string& assignment);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Mandatory seed lookup; missing or malformed values raise
  /// invalid_config (reproducibility requires explicit seeds).
  std::uint64_t get_seed(const std::string& key) const;
  std::vector<double> get_list(const std::string& key,
                               const std::vector<double>& fallback) const;

  /// Canonical serialization (sorted key=value lines) used for the manifest
  /// hash: the hash changes exactly when the effective config changes.
  std::string canonical() const;
};

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Everything the pipeline commands need, constructed from a config.
struct BuiltExperiment {
  BenchConfig bench;
  DetectorArray array;
  PhotonPairSource source;
  MeasureOptions tm_options;
  Encoding encoding = Encoding::phase_only;
  double duration_s = 100.0;
  double delta_t_s = 1e-9;
  std::uint64_t run_seed = 0;
};

BuiltExperiment build_experiment(const ExperimentConfig& config);

/// Measures both polarization TMs, writes them as JSON, and reports the
/// per-row reconstruction collinearity against the ground truth.
int cmd_measure_tm(const ExperimentConfig& config, const std::string& out_dir);

/// Pipeline subcommands: hom | sylvester | random-study |
/// calibrate-crosstalk | localize. Each writes CSV/JSON artifacts plus a
/// manifest recording the config hash and seeds.
int cmd_run(const ExperimentConfig& config, const std::string& subcommand,
            const std::string& out_dir);

}  // namespace fiberqc

#endif  // FIBERQC_EXPERIMENT_HPP
