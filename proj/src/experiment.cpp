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

#include "fiberqc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fiberqc/error.hpp"
#include "fiberqc/rng.hpp"
#include "fiberqc/serialize.hpp"

namespace fiberqc {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0')
    raise(ErrorCode::invalid_config, "malformed number for " + key + ": " + raw);
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& raw) {
  char* end = nullptr;
  const long long v = std::strtoll(raw.c_str(), &end, 10);
  if (end == raw.c_str() || *end != '\0')
    raise(ErrorCode::invalid_config,
          "malformed integer for " + key + ": " + raw);
  return v;
}

std::vector<std::string> split_csv(const std::string& raw) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(raw);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  ExperimentConfig config;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        raise(ErrorCode::invalid_config,
              "unterminated section header at line " + std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      raise(ErrorCode::invalid_config,
            "expected key = value at line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      raise(ErrorCode::invalid_config,
            "empty key at line " + std::to_string(line_no));
    config.values[section.empty() ? key : section + "." + key] = value;
  }
  return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_error, "cannot open config: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_text(buffer.str());
}

void ExperimentConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    raise(ErrorCode::invalid_config,
          "override must look like section.key=value: " + assignment);
  const std::string key = trim(assignment.substr(0, eq));
  if (key.empty())
    raise(ErrorCode::invalid_config, "override has an empty key");
  values[key] = trim(assignment.substr(eq + 1));
}

bool ExperimentConfig::has(const std::string& key) const {
  return values.count(key) != 0;
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key,
                                    double fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : parse_double(key, it->second);
}

std::int64_t ExperimentConfig::get_int(const std::string& key,
                                       std::int64_t fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : parse_int(key, it->second);
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  raise(ErrorCode::invalid_config, "malformed boolean for " + key);
}

std::uint64_t ExperimentConfig::get_seed(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end())
    raise(ErrorCode::invalid_config,
          "missing mandatory seed: " + key +
              " (explicit seeds keep runs reproducible)");
  return static_cast<std::uint64_t>(parse_int(key, it->second));
}

std::vector<double> ExperimentConfig::get_list(
    const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::vector<double> out;
  for (const auto& part : split_csv(it->second))
    out.push_back(parse_double(key, part));
  if (out.empty())
    raise(ErrorCode::invalid_config, "empty list for " + key);
  return out;
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream out;
  for (const auto& [key, value] : values) out << key << '=' << value << '\n';
  return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

BuiltExperiment build_experiment(const ExperimentConfig& config) {
  const std::string preset_name = config.get_string("preset", "");
  const bool benchtop = preset_name == "benchtop";
  if (!preset_name.empty() && !benchtop)
    raise(ErrorCode::invalid_config, "unknown preset: " + preset_name);

  BuiltExperiment built;

  const auto n_pix =
      static_cast<int>(config.get_int("array.n_pix", preset::kNPix));
  const auto n_modes = static_cast<Index>(
      config.get_int("bench.n_modes", benchtop ? preset::kNModes : 64));
  const auto n_det =
      static_cast<Index>(config.get_int("bench.n_det", n_pix));
  const double loss =
      config.get_double("bench.loss", benchtop ? preset::kLossFraction : 0.0);
  const std::uint64_t bench_seed = config.get_seed("bench.seed");

  built.bench = make_bench(n_modes, n_det, loss, bench_seed);
  built.bench.slm_phase_error_sigma = config.get_double(
      "bench.slm_sigma", benchtop ? preset::kSlmPhaseErrorSigma : 0.0);

  built.array = DetectorArray::with_defaults(
      n_pix,
      config.get_double("array.efficiency",
                        benchtop ? preset::kEfficiency : 1.0),
      config.get_double("array.dark_rate", benchtop ? preset::kDarkRate : 0.0),
      config.get_double("array.crosstalk_nn",
                        benchtop ? preset::kBetaNearest : 0.0));
  built.array.dead_time_s = config.get_double("array.dead_time", 50e-9);
  built.array.jitter_fwhm_s = config.get_double("array.jitter_fwhm", 120e-12);
  if (config.has("array.disabled")) {
    built.array.disabled_pixels.clear();
    for (const auto& part :
         split_csv(config.get_string("array.disabled", "")))
      built.array.disabled_pixels.push_back(
          static_cast<int>(parse_int("array.disabled", part)));
  }
  built.array.validate();

  built.source.pair_rate_hz =
      config.get_double("source.pair_rate", preset::kPairRate);
  built.source.max_indistinguishability =
      config.get_double("source.indistinguishability", preset::kGamma0);
  built.source.coherence_sigma_s =
      config.get_double("source.coherence_sigma", preset::kCoherenceSigma);
  built.source.validate();

  built.tm_options.photon_scale = config.get_double(
      "tm.photon_scale", benchtop ? preset::kTmPhotonScale : 0.0);
  built.tm_options.normalize_reference =
      config.get_bool("tm.normalize_reference", true);
  built.tm_options.seed =
      config.has("tm.seed")
          ? config.get_seed("tm.seed")
          : derive_seed(bench_seed, 0x7117ULL);

  const std::string encoding = config.get_string("run.encoding", "phase_only");
  if (encoding == "phase_only")
    built.encoding = Encoding::phase_only;
  else if (encoding == "complex")
    built.encoding = Encoding::complex_field;
  else
    raise(ErrorCode::invalid_config, "unknown encoding: " + encoding);

  built.duration_s = config.get_double("acquisition.duration",
                                       benchtop ? preset::kDuration : 100.0);
  built.delta_t_s =
      config.get_double("acquisition.delta_t", preset::kDeltaT);
  built.run_seed = config.get_seed("run.seed");
  return built;
}

namespace {

/// Measures both polarization TMs of a built experiment.
TwoPhotonTM measure_both(const BuiltExperiment& built) {
  MeasureOptions opts = built.tm_options;
  opts.seed = derive_seed(built.tm_options.seed, 0);
  MeasuredTM h = measure_tm(built.bench, Polarization::horizontal, opts);
  opts.seed = derive_seed(built.tm_options.seed, 1);
  MeasuredTM v = measure_tm(built.bench, Polarization::vertical, opts);
  return assemble_two_photon(std::move(h), std::move(v));
}

std::vector<Index> first_enabled(const DetectorArray& array, Index n_det) {
  const auto usable = array.enabled();
  require_dimension(n_det >= 1 &&
                        n_det <= static_cast<Index>(usable.size()),
                    "operator size exceeds the usable pixels");
  std::vector<Index> subset(static_cast<std::size_t>(n_det));
  for (Index k = 0; k < n_det; ++k)
    subset[static_cast<std::size_t>(k)] =
        static_cast<Index>(usable[static_cast<std::size_t>(k)]);
  return subset;
}

TargetOperator make_target(const ExperimentConfig& config,
                           const BuiltExperiment& built, Index n_det) {
  const std::string kind = config.get_string("run.operator", "sylvester");
  if (kind == "sylvester") return sylvester_operator(n_det);
  if (kind == "random") {
    const std::uint64_t seed =
        config.has("run.operator_seed")
            ? config.get_seed("run.operator_seed")
            : derive_seed(built.run_seed, 0x09ULL);
    return random_operator(n_det, seed);
  }
  if (kind == "file") {
    const std::string path = config.get_string("run.operator_file", "");
    if (path.empty())
      raise(ErrorCode::invalid_config,
            "run.operator = file requires run.operator_file");
    TargetOperator op = target_from_json(load_json(path));
    require_dimension(op.n_det() == n_det,
                      "operator file size does not match run.n_det");
    return op;
  }
  raise(ErrorCode::invalid_config, "unknown operator kind: " + kind);
}

/// Loads the background-correction model when the config requests one.
bool load_correction(const ExperimentConfig& config, Index n_pix,
                     CrosstalkModel* model) {
  const std::string mode = config.get_string("run.correction", "none");
  if (mode == "none") return false;
  if (mode != "model")
    raise(ErrorCode::invalid_config, "unknown correction mode: " + mode);
  const std::string path = config.get_string("run.model_file", "");
  if (path.empty())
    raise(ErrorCode::invalid_config,
          "correction requested but no calibration model supplied; run "
          "calibrate-crosstalk first and set run.model_file");
  *model = crosstalk_model_from_json(load_json(path));
  require_dimension(model->alpha.rows() == n_pix,
                    "calibration model pixel count mismatch");
  return true;
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::string& subcommand,
                    const ExperimentConfig& config,
                    const BuiltExperiment& built,
                    const std::vector<std::string>& outputs) {
  char hash_hex[19];
  std::snprintf(hash_hex, sizeof(hash_hex), "0x%016llx",
                static_cast<unsigned long long>(fnv1a64(config.canonical())));
  Json manifest{{"command", command},
                {"subcommand", subcommand},
                {"config_hash", hash_hex},
                {"seeds",
                 {{"bench", built.bench.seed},
                  {"tm", built.tm_options.seed},
                  {"run", built.run_seed}}},
                {"outputs", outputs}};
  save_json(join_path(out_dir, "manifest.json"), manifest);
}

int run_hom(const ExperimentConfig& config, const BuiltExperiment& built,
            const std::string& out_dir) {
  const auto n_det = static_cast<Index>(config.get_int("run.n_det", 4));
  const std::vector<double> default_delays = {
      -800e-15, -600e-15, -450e-15, -300e-15, -200e-15, -100e-15, 0.0,
      100e-15,  200e-15,  300e-15,  450e-15,  600e-15,  800e-15};
  const std::vector<double> delays = config.get_list("hom.delays",
                                                     default_delays);

  PipelineConfig pipeline;
  pipeline.bench = built.bench;
  pipeline.tm = measure_both(built);
  pipeline.detectors = first_enabled(built.array, n_det);
  pipeline.target = make_target(config, built, n_det);
  pipeline.encoding = built.encoding;
  pipeline.source = built.source;
  pipeline.array = built.array;
  pipeline.duration_s = built.duration_s;
  pipeline.delta_t_s = built.delta_t_s;
  pipeline.seed = derive_seed(built.run_seed, 0x401ULL);

  std::vector<CoincidenceRecord> records = hom_scan_measure(pipeline, delays);

  CrosstalkModel model;
  if (load_correction(config, built.array.n_pix, &model))
    for (auto& rec : records) rec = correct_coincidences(rec, model);

  const HomScan theory =
      hom_scan(pipeline.target, built.source, delays, built.duration_s);

  std::vector<std::string> outputs = {"hom_measured.csv", "hom_theory.csv",
                                      "hom_visibilities.csv"};
  write_hom_records_csv(join_path(out_dir, outputs[0]), delays, records,
                        pipeline.detectors);
  write_hom_scan_csv(join_path(out_dir, outputs[1]), theory);

  // Visibility per pair: zero-delay counts against the farthest delay.
  std::size_t zero_idx = 0, far_idx = 0;
  for (std::size_t k = 0; k < delays.size(); ++k) {
    if (std::abs(delays[k]) < std::abs(delays[zero_idx])) zero_idx = k;
    if (std::abs(delays[k]) > std::abs(delays[far_idx])) far_idx = k;
  }
  {
    std::ofstream out(join_path(out_dir, outputs[2]));
    if (!out) raise(ErrorCode::io_error, "cannot write visibilities");
    out << "i,j,c_far,c_zero,visibility\n";
    const auto& pix = pipeline.detectors;
    for (std::size_t a = 0; a < pix.size(); ++a)
      for (std::size_t b = a + 1; b < pix.size(); ++b) {
        const double far = records[far_idx].counts(pix[a], pix[b]);
        const double zero = records[zero_idx].counts(pix[a], pix[b]);
        out << pix[a] << ',' << pix[b] << ',' << format_double(far) << ','
            << format_double(zero) << ','
            << format_double(far > 0.0 ? visibility(far, zero)
                                       : std::nan(""))
            << '\n';
      }
  }
  write_manifest(out_dir, "run", "hom", config, built, outputs);
  return 0;
}

int run_sylvester(const ExperimentConfig& config, const BuiltExperiment& built,
                  const std::string& out_dir) {
  const auto n_det = static_cast<Index>(config.get_int("run.n_det", 10));

  PipelineConfig pipeline;
  pipeline.bench = built.bench;
  pipeline.tm = measure_both(built);
  pipeline.detectors = first_enabled(built.array, n_det);
  pipeline.target = make_target(config, built, n_det);
  pipeline.encoding = built.encoding;
  pipeline.source = built.source;
  pipeline.array = built.array;
  pipeline.duration_s = built.duration_s;
  pipeline.delta_t_s = built.delta_t_s;

  CrosstalkModel model;
  const bool corrected = load_correction(config, built.array.n_pix, &model);

  std::vector<std::string> outputs;
  Json report;
  for (PhotonClass cls :
       {PhotonClass::indistinguishable, PhotonClass::distinguishable}) {
    const bool indist = cls == PhotonClass::indistinguishable;
    pipeline.seed = derive_seed(built.run_seed, indist ? 0x502ULL : 0x503ULL);

    PipelineConfig run = pipeline;
    run.source.max_indistinguishability =
        indist ? built.source.max_indistinguishability : 0.0;
    std::vector<CoincidenceRecord> records = hom_scan_measure(run, {0.0});
    CoincidenceRecord rec = records.front();
    if (corrected) rec = correct_coincidences(rec, model);

    const OutcomeDistribution theory =
        coincidence_distribution(pipeline.target, indist ? 1.0 : 0.0);
    const double s = similarity(rec, theory, pipeline.detectors);

    const std::string tag = photon_class_name(cls);
    const std::string exp_name = "coincidences_" + tag + ".csv";
    const std::string theory_name = "theory_" + tag + ".csv";
    write_coincidences_csv(join_path(out_dir, exp_name), rec);
    write_distribution_csv(join_path(out_dir, theory_name), theory);
    outputs.push_back(exp_name);
    outputs.push_back(theory_name);
    report[tag] = {{"similarity", s}};
  }
  save_json(join_path(out_dir, "similarity_report.json"), report);
  outputs.push_back("similarity_report.json");
  write_manifest(out_dir, "run", "sylvester", config, built, outputs);
  return 0;
}

int run_random_study(const ExperimentConfig& config,
                     const BuiltExperiment& built,
                     const std::string& out_dir) {
  StudyConfig study;
  study.bench = built.bench;
  study.array = built.array;
  study.source = built.source;
  study.encoding = built.encoding;
  study.tm_photon_scale = built.tm_options.photon_scale;
  study.duration_s = built.duration_s;
  study.delta_t_s = built.delta_t_s;
  study.trials = static_cast<int>(config.get_int("study.trials", 100));
  study.seed = derive_seed(built.run_seed, 0x600ULL);
  for (double d : config.get_list("study.detectors", {4, 7, 10, 16, 22}))
    study.detector_counts.push_back(static_cast<int>(d));

  CrosstalkModel model;
  const bool corrected = load_correction(config, built.array.n_pix, &model);
  if (corrected) study.correction = &model;

  const std::vector<SimilarityReport> reports = random_circuit_study(study);

  std::vector<std::string> outputs = {"similarity_summary.csv",
                                      "similarity_trials.csv"};
  write_similarity_summary_csv(join_path(out_dir, outputs[0]), reports);
  write_similarity_trials_csv(join_path(out_dir, outputs[1]), reports);
  write_manifest(out_dir, "run", "random-study", config, built, outputs);
  return 0;
}

int run_calibrate(const ExperimentConfig& config, const BuiltExperiment& built,
                  const std::string& out_dir) {
  const auto patterns =
      static_cast<int>(config.get_int("calibrate.patterns", 1000));
  const double duration = config.get_double("calibrate.duration", 1.0);
  const double intensity = config.get_double("calibrate.intensity", 2000.0);
  require_config(patterns >= 3, "need at least 3 calibration patterns");

  // Classical speckle: random masks through the fiber set per-pixel rates
  // proportional to the output intensities.
  const double mean_power = 1.0 - built.bench.loss_fraction;
  std::vector<CoincidenceRecord> records;
  records.reserve(static_cast<std::size_t>(patterns));
  for (int p = 0; p < patterns; ++p) {
    Rng rng = make_rng(derive_seed(built.run_seed, 0x700ULL + p));
    PhaseMask mask;
    mask.phases = RealVector(built.bench.n_modes);
    for (Index m = 0; m < built.bench.n_modes; ++m)
      mask.phases(m) = uniform01(rng) * 6.283185307179586;
    PropagateOptions opts;
    opts.noise_seed = derive_seed(built.run_seed, 0x70000ULL + p);
    const ComplexVector field = propagate_pol(
        built.bench, Polarization::horizontal, mask,
        RealVector::Ones(built.bench.n_modes), opts);
    RealVector rates(built.array.n_pix);
    for (Index i = 0; i < rates.size(); ++i)
      rates(i) = intensity * std::norm(field(i)) / mean_power;
    TimeTagStream stream =
        simulate_classical(rates, built.array, duration,
                           derive_seed(built.run_seed, 0x80000ULL + p));
    records.push_back(count_coincidences(stream, built.delta_t_s));
  }

  const CrosstalkFit fit = fit_crosstalk(records, built.delta_t_s);
  save_json(join_path(out_dir, "crosstalk_model.json"), to_json(fit.model));

  // Report recovery quality against the injected ground truth.
  double alpha_mean = 0.0, nn_rel_err = 0.0;
  int n_pairs = 0, n_nn = 0;
  const double pitch = built.array.pitch_um;
  for (Index i = 0; i < built.array.n_pix; ++i) {
    if (built.array.is_disabled(static_cast<int>(i))) continue;
    for (Index j = i + 1; j < built.array.n_pix; ++j) {
      if (built.array.is_disabled(static_cast<int>(j))) continue;
      alpha_mean += fit.model.alpha(i, j);
      ++n_pairs;
      const double d = (built.array.positions_um[static_cast<std::size_t>(i)] -
                        built.array.positions_um[static_cast<std::size_t>(j)])
                           .norm();
      const double truth = built.array.crosstalk_true(i, j);
      if (std::abs(d - pitch) < 1e-6 * pitch && truth > 0.0) {
        nn_rel_err += std::abs(fit.model.beta(i, j) - truth) / truth;
        ++n_nn;
      }
    }
  }
  Json report{{"patterns", patterns},
              {"alpha_mean", n_pairs ? alpha_mean / n_pairs : 0.0},
              {"nearest_neighbor_beta_mean_rel_error",
               n_nn ? nn_rel_err / n_nn : 0.0},
              {"clamped_coefficients", fit.clamped}};
  save_json(join_path(out_dir, "calibration_report.json"), report);

  write_manifest(out_dir, "run", "calibrate-crosstalk", config, built,
                 {"crosstalk_model.json", "calibration_report.json"});
  return 0;
}

int run_localize(const ExperimentConfig& config, const BuiltExperiment& built,
                 const std::string& out_dir) {
  const double psf_sigma = config.get_double("localize.psf_sigma", 2.0);
  const double spacing_px = config.get_double("localize.spacing_px", 9.0);
  const double snr = config.get_double("localize.snr", 0.0);

  const TwoPhotonTM tm = measure_both(built);
  const std::vector<int> enabled = built.array.enabled();

  // Map every detector position into camera pixels with a margin; light
  // reaches disabled pixels too, we just never time-tag them.
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (const auto& pos : built.array.positions_um) {
    min_x = std::min(min_x, pos.x());
    max_x = std::max(max_x, pos.x());
    min_y = std::min(min_y, pos.y());
    max_y = std::max(max_y, pos.y());
  }
  const double margin = 5.0 * psf_sigma + 2.0;
  const double scale = spacing_px / built.array.pitch_um;
  const int width =
      static_cast<int>(std::ceil((max_x - min_x) * scale + 2.0 * margin));
  const int height =
      static_cast<int>(std::ceil((max_y - min_y) * scale + 2.0 * margin));

  std::vector<Eigen::Vector2d> positions_px;
  for (const auto& pos : built.array.positions_um)
    positions_px.emplace_back((pos.x() - min_x) * scale + margin,
                              (pos.y() - min_y) * scale + margin);

  // One focusing operator per enabled detector; the rendered spot sits at
  // that detector's camera position.
  std::vector<Image> images;
  for (std::size_t k = 0; k < enabled.size(); ++k) {
    const TargetOperator target =
        focusing_operator(built.bench.n_det, enabled[k]);
    const SlmProgram program =
        synthesize_slm(tm, target, built.encoding);
    const TargetOperator realized = realized_operator(
        built.bench, program, derive_seed(built.run_seed, 0x900ULL + k));
    Image img = render_camera(realized.column_h, positions_px, psf_sigma,
                              width, height, 0.0);
    if (snr > 0.0)
      img = with_noise(img, img.max_value() / snr,
                       derive_seed(built.run_seed, 0xa00ULL + k));
    images.push_back(std::move(img));
  }

  const DetectorLocalization loc =
      localize_detectors(images, static_cast<int>(images.size()));

  std::vector<std::string> outputs = {"localization.csv",
                                      "localization_report.json"};
  write_localization_csv(join_path(out_dir, outputs[0]), loc);

  double max_err = 0.0;
  int n_ok = 0;
  for (std::size_t k = 0; k < images.size(); ++k) {
    if (!loc.ok[k]) continue;
    ++n_ok;
    const auto& expected =
        positions_px[static_cast<std::size_t>(enabled[k])];
    const double err =
        (Eigen::Vector2d(loc.fits[k].x0, loc.fits[k].y0) - expected).norm();
    max_err = std::max(max_err, err);
  }
  Json report{{"localized", n_ok},
              {"expected", static_cast<int>(images.size())},
              {"max_position_error_px", max_err},
              {"spacing_cv", loc.spacing_cv},
              {"grid_consistent", loc.grid_consistent}};
  save_json(join_path(out_dir, outputs[1]), report);

  const std::string spot_name = "spot_detector0.pgm";
  if (!images.empty()) {
    write_pgm16(join_path(out_dir, spot_name), images.front());
    outputs.push_back(spot_name);
  }
  write_manifest(out_dir, "run", "localize", config, built, outputs);
  return 0;
}

}  // namespace

int cmd_measure_tm(const ExperimentConfig& config,
                   const std::string& out_dir) {
  const BuiltExperiment built = build_experiment(config);
  fs::create_directories(out_dir);

  MeasureOptions opts = built.tm_options;
  opts.seed = derive_seed(built.tm_options.seed, 0);
  const MeasuredTM tm_h =
      measure_tm(built.bench, Polarization::horizontal, opts);
  opts.seed = derive_seed(built.tm_options.seed, 1);
  const MeasuredTM tm_v =
      measure_tm(built.bench, Polarization::vertical, opts);

  save_json(join_path(out_dir, "tm_h.json"), to_json(tm_h));
  save_json(join_path(out_dir, "tm_v.json"), to_json(tm_v));

  // Row collinearity against ground truth (reference phases drop out of the
  // absolute inner product).
  auto report_rows = [](const MeasuredTM& tm, const ComplexMatrix& truth,
                        std::ofstream& out, const char* tag) {
    double mean = 0.0;
    for (Index i = 0; i < tm.n_det(); ++i) {
      const ComplexVector a = tm.t.row(i).transpose();
      const ComplexVector b = truth.row(i).transpose();
      const double c = std::sqrt(column_fidelity(a, b));
      out << tag << ',' << i << ',' << format_double(c) << '\n';
      mean += c;
    }
    return mean / static_cast<double>(tm.n_det());
  };

  std::ofstream report(join_path(out_dir, "reconstruction_report.csv"));
  if (!report) raise(ErrorCode::io_error, "cannot write reconstruction report");
  report << "polarization,row,collinearity\n";
  const double mean_h =
      report_rows(tm_h, built.bench.transmission_h, report, "h");
  const double mean_v =
      report_rows(tm_v, built.bench.transmission_v, report, "v");
  report.close();

  std::cout << "tm reconstruction collinearity: h=" << format_double(mean_h)
            << " v=" << format_double(mean_v) << '\n';

  write_manifest(out_dir, "measure-tm", "", config, built,
                 {"tm_h.json", "tm_v.json", "reconstruction_report.csv"});
  return 0;
}

int cmd_run(const ExperimentConfig& config, const std::string& subcommand,
            const std::string& out_dir) {
  const BuiltExperiment built = build_experiment(config);
  fs::create_directories(out_dir);

  if (subcommand == "hom") return run_hom(config, built, out_dir);
  if (subcommand == "sylvester") return run_sylvester(config, built, out_dir);
  if (subcommand == "random-study")
    return run_random_study(config, built, out_dir);
  if (subcommand == "calibrate-crosstalk")
    return run_calibrate(config, built, out_dir);
  if (subcommand == "localize") return run_localize(config, built, out_dir);
  raise(ErrorCode::invalid_config, "unknown subcommand: " + subcommand);
}

}  // namespace fiberqc
