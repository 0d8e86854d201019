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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fiberqc/error.hpp"
#include "fiberqc/experiment.hpp"
#include "fiberqc/rng.hpp"
#include "fiberqc/serialize.hpp"

using namespace fiberqc;

namespace {

std::filesystem::path temp_dir(const std::string& leaf) {
  const auto dir =
      std::filesystem::temp_directory_path() / "fiberqc_experiment_tests" /
      leaf;
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("INI text parses sections, comments and whitespace") {
  const ExperimentConfig config = ExperimentConfig::from_text(
      "preset = benchtop   # trailing comment\n"
      "\n"
      "[bench]\n"
      "seed = 7\n"
      "  loss =  0.1  ; another comment style\n"
      "[run]\n"
      "seed=9\n");
  CHECK(config.get_string("preset", "") == "benchtop");
  CHECK(config.get_string("bench.seed", "") == "7");
  CHECK(config.get_string("bench.loss", "") == "0.1");
  CHECK(config.get_string("run.seed", "") == "9");
  CHECK(!config.has("loss"));  // section prefix is mandatory
}

TEST_CASE("later assignments win over earlier ones") {
  const ExperimentConfig config = ExperimentConfig::from_text(
      "[bench]\nseed = 1\nseed = 2\n");
  CHECK(config.get_int("bench.seed", 0) == 2);
}

TEST_CASE("malformed INI text raises a config error") {
  for (const char* text : {"[bench\nseed = 1\n",  // unterminated section
                           "just some words\n",   // no equals sign
                           "= 5\n"}) {            // empty key
    try {
      ExperimentConfig::from_text(text);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_config);
    }
  }
}

TEST_CASE("config files load from disk and missing paths raise io errors") {
  const auto dir = temp_dir("from_file");
  const std::string path = (dir / "exp.ini").string();
  std::ofstream(path) << "[bench]\nseed = 5\n";
  const ExperimentConfig config = ExperimentConfig::from_file(path);
  CHECK(config.get_int("bench.seed", 0) == 5);
  try {
    ExperimentConfig::from_file((dir / "missing.ini").string());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io_error);
  }
}

TEST_CASE("overrides apply dotted keys and reject malformed input") {
  ExperimentConfig config;
  config.set("bench.loss = 0.25");
  CHECK(config.get_double("bench.loss", 0.0) == 0.25);
  try {
    config.set("no_equals_sign");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_config);
  }
}

TEST_CASE("typed getters fall back and reject malformed values") {
  const ExperimentConfig config = ExperimentConfig::from_text(
      "[a]\nx = 1.5\nn = 42\nflag = true\noff = 0\nbad = zebra\n"
      "list = 1, 2.5 ,3\n");
  CHECK(config.get_double("a.x", 0.0) == 1.5);
  CHECK(config.get_double("a.missing", 7.0) == 7.0);
  CHECK(config.get_int("a.n", 0) == 42);
  CHECK(config.get_bool("a.flag", false));
  CHECK(!config.get_bool("a.off", true));
  CHECK(config.get_bool("a.missing", true));
  const std::vector<double> list = config.get_list("a.list", {});
  REQUIRE(list.size() == 3);
  CHECK(list[1] == 2.5);

  try {
    config.get_double("a.bad", 0.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_config);
  }
  try {
    config.get_int("a.x", 0);  // "1.5" is not an integer
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_config);
  }
  try {
    config.get_bool("a.bad", false);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_config);
  }
}

TEST_CASE("seeds are mandatory wherever they are consumed") {
  const ExperimentConfig config = ExperimentConfig::from_text("[a]\nx = 5\n");
  CHECK(config.get_seed("a.x") == 5);
  try {
    config.get_seed("a.seed");
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_config);
  }
}

TEST_CASE("canonical form sorts keys so the hash is order-independent") {
  const ExperimentConfig a =
      ExperimentConfig::from_text("[b]\ny = 2\n[a]\nx = 1\n");
  const ExperimentConfig b =
      ExperimentConfig::from_text("[a]\nx = 1\n[b]\ny = 2\n");
  CHECK(a.canonical() == "a.x=1\nb.y=2\n");
  CHECK(a.canonical() == b.canonical());
  CHECK(fnv1a64(a.canonical()) == fnv1a64(b.canonical()));
}

TEST_CASE("the hash matches the published FNV-1a test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("plain configurations build a noiseless experiment") {
  const ExperimentConfig config = ExperimentConfig::from_text(
      "[bench]\nseed = 11\n[run]\nseed = 12\n[array]\nn_pix = 4\n");
  const BuiltExperiment built = build_experiment(config);
  CHECK(built.bench.n_modes == 64);
  CHECK(built.bench.n_det == 4);
  CHECK(built.bench.loss_fraction == 0.0);
  CHECK(built.bench.slm_phase_error_sigma == 0.0);
  CHECK(built.array.n_pix == 4);
  CHECK(built.array.efficiency(0) == 1.0);
  CHECK(built.array.dark_rate_cps.maxCoeff() == 0.0);
  CHECK(built.array.crosstalk_true.maxCoeff() == 0.0);
  CHECK(built.tm_options.photon_scale == 0.0);
  CHECK(built.encoding == Encoding::phase_only);
  CHECK(built.duration_s == 100.0);
  CHECK(built.delta_t_s == 1e-9);
  CHECK(built.run_seed == 12);
  CHECK(built.tm_options.seed == derive_seed(11, 0x7117ULL));
}

TEST_CASE("the benchtop preset switches every noise default on") {
  const ExperimentConfig config = ExperimentConfig::from_text(
      "preset = benchtop\n[bench]\nseed = 11\n[run]\nseed = 12\n");
  const BuiltExperiment built = build_experiment(config);
  CHECK(built.bench.n_modes == 64);
  CHECK(built.bench.n_det == 23);
  CHECK(built.bench.loss_fraction == doctest::Approx(0.1));
  CHECK(built.bench.slm_phase_error_sigma == doctest::Approx(0.3));
  CHECK(built.array.n_pix == 23);
  CHECK(built.array.efficiency(0) == doctest::Approx(0.8));
  CHECK(built.array.dark_rate_cps(0) == doctest::Approx(100.0));
  // Nearest neighbors sit one pitch apart, so their coupling is beta itself.
  CHECK(built.array.crosstalk_true(0, 1) == doctest::Approx(1e-3));
  CHECK(built.array.is_disabled(22));
  CHECK(built.tm_options.photon_scale == doctest::Approx(25.0));
  CHECK(built.source.max_indistinguishability == doctest::Approx(0.95));
  CHECK(built.source.coherence_sigma_s == doctest::Approx(150e-15));
  CHECK(built.duration_s == 100.0);
}

TEST_CASE("explicit values override the preset") {
  const ExperimentConfig config = ExperimentConfig::from_text(
      "preset = benchtop\n[bench]\nseed = 11\nloss = 0.2\n"
      "[run]\nseed = 12\nencoding = complex\n[array]\ndark_rate = 10\n");
  const BuiltExperiment built = build_experiment(config);
  CHECK(built.bench.loss_fraction == doctest::Approx(0.2));
  CHECK(built.array.dark_rate_cps(0) == doctest::Approx(10.0));
  CHECK(built.encoding == Encoding::complex_field);
}

TEST_CASE("disabled pixels can be overridden from the config") {
  const ExperimentConfig config = ExperimentConfig::from_text(
      "[bench]\nseed = 1\n[run]\nseed = 2\n[array]\nn_pix = 5\n"
      "disabled = 0, 2\n");
  const BuiltExperiment built = build_experiment(config);
  CHECK(built.array.is_disabled(0));
  CHECK(built.array.is_disabled(2));
  CHECK(!built.array.is_disabled(1));
  CHECK(built.array.enabled().size() == 3);
}

TEST_CASE("unknown presets, encodings and missing seeds are config errors") {
  try {
    build_experiment(ExperimentConfig::from_text(
        "preset = desktopx\n[bench]\nseed = 1\n[run]\nseed = 2\n"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_config);
  }
  try {
    build_experiment(ExperimentConfig::from_text(
        "[bench]\nseed = 1\n[run]\nseed = 2\nencoding = fancy\n"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_config);
  }
  try {
    build_experiment(ExperimentConfig::from_text("[run]\nseed = 2\n"));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_config);
  }
}

TEST_CASE("measure-tm writes matrices, a report and a manifest") {
  const auto dir = temp_dir("measure_tm");
  const ExperimentConfig config = ExperimentConfig::from_text(
      "[bench]\nseed = 21\nn_modes = 8\n[run]\nseed = 22\n"
      "[array]\nn_pix = 3\n");
  CHECK(cmd_measure_tm(config, dir.string()) == 0);

  const MeasuredTM tm_h =
      measured_tm_from_json(load_json((dir / "tm_h.json").string()));
  CHECK(tm_h.n_det() == 3);
  CHECK(tm_h.n_modes() == 8);
  CHECK(tm_h.reference_normalized);
  CHECK(std::filesystem::exists(dir / "tm_v.json"));
  CHECK(std::filesystem::exists(dir / "reconstruction_report.csv"));

  const Json manifest = load_json((dir / "manifest.json").string());
  CHECK(manifest.at("command").get<std::string>() == "measure-tm");
  CHECK(manifest.at("seeds").at("bench").get<std::uint64_t>() == 21);
  const std::string hash = manifest.at("config_hash").get<std::string>();
  CHECK(hash.rfind("0x", 0) == 0);
  CHECK(hash.size() == 18);
}

TEST_CASE("a small measured interference run produces its artifacts") {
  const auto dir = temp_dir("run_hom");
  const ExperimentConfig config = ExperimentConfig::from_text(
      "[bench]\nseed = 31\nn_modes = 8\n[run]\nseed = 32\nn_det = 2\n"
      "encoding = complex\n[array]\nn_pix = 2\n"
      "[source]\npair_rate = 500\n[acquisition]\nduration = 2\n"
      "[hom]\ndelays = 0, 8e-13\n");
  CHECK(cmd_run(config, "hom", dir.string()) == 0);
  for (const char* name : {"hom_measured.csv", "hom_theory.csv",
                           "hom_visibilities.csv", "manifest.json"})
    CHECK(std::filesystem::exists(dir / name));
  const Json manifest = load_json((dir / "manifest.json").string());
  CHECK(manifest.at("subcommand").get<std::string>() == "hom");
  CHECK(manifest.at("outputs").size() == 3);
}

TEST_CASE("unknown run subcommands are config errors") {
  const ExperimentConfig config = ExperimentConfig::from_text(
      "[bench]\nseed = 1\n[run]\nseed = 2\n[array]\nn_pix = 3\n");
  try {
    cmd_run(config, "teleport", temp_dir("unknown").string());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_config);
  }
}

TEST_SUITE_END();
