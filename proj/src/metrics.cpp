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

#include "fiberqc/metrics.hpp"

#include <cmath>

#include "fiberqc/error.hpp"
#include "fiberqc/rng.hpp"

namespace fiberqc {

double similarity(const RealMatrix& counts_e, const RealMatrix& counts_t,
                  const std::vector<Index>& pixels) {
  require_dimension(pixels.size() >= 2,
                    "similarity needs at least two detectors");
  double cross = 0.0, sum_e = 0.0, sum_t = 0.0;
  for (std::size_t a = 0; a < pixels.size(); ++a) {
    for (std::size_t b = a + 1; b < pixels.size(); ++b) {
      const double e = counts_e(pixels[a], pixels[b]);
      const double t = counts_t(pixels[a], pixels[b]);
      require_parameter(e >= 0.0 && t >= 0.0,
                        "coincidence values must be >= 0");
      cross += std::sqrt(e * t);
      sum_e += e;
      sum_t += t;
    }
  }
  if (sum_e <= 0.0 || sum_t <= 0.0)
    raise(ErrorCode::undefined_similarity,
          "similarity undefined for an all-zero distribution");
  return cross * cross / (sum_e * sum_t);
}

double similarity(const CoincidenceRecord& experiment,
                  const OutcomeDistribution& theory,
                  const std::vector<Index>& pixels) {
  require_dimension(static_cast<Index>(pixels.size()) == theory.n_det,
                    "theory slots must match the pixel subset");
  const Index n = experiment.n_pix();
  RealMatrix theory_counts = RealMatrix::Zero(n, n);
  for (Index a = 0; a < theory.n_det; ++a) {
    for (Index b = a + 1; b < theory.n_det; ++b) {
      const Index pa = pixels[static_cast<std::size_t>(a)];
      const Index pb = pixels[static_cast<std::size_t>(b)];
      theory_counts(pa, pb) = theory_counts(pb, pa) = theory.prob(a, b);
    }
  }
  return similarity(experiment.counts, theory_counts, pixels);
}

double similarity(const CoincidenceRecord& experiment,
                  const CoincidenceRecord& theory,
                  const std::vector<Index>& pixels) {
  require_dimension(experiment.n_pix() == theory.n_pix(),
                    "records must share the pixel count");
  return similarity(experiment.counts, theory.counts, pixels);
}

const char* photon_class_name(PhotonClass c) {
  return c == PhotonClass::distinguishable ? "distinguishable"
                                           : "indistinguishable";
}

std::vector<SimilarityReport> random_circuit_study(const StudyConfig& config) {
  config.bench.validate();
  config.array.validate();
  config.source.validate();
  require_dimension(config.bench.n_det == config.array.n_pix,
                    "bench detectors and array pixels must match");
  require_parameter(config.trials >= 1, "study needs at least one trial");
  require_parameter(!config.detector_counts.empty(),
                    "study needs at least one operator size");

  const std::vector<int> usable = config.array.enabled();
  for (int n_det : config.detector_counts)
    require_dimension(n_det >= 2 &&
                          n_det <= static_cast<int>(usable.size()),
                      "operator sizes must fit the usable pixels");

  // One TM measurement serves the whole study (one physical fiber).
  MeasureOptions tm_opts;
  tm_opts.photon_scale = config.tm_photon_scale;
  tm_opts.seed = derive_seed(config.seed, 0x7a11ULL);
  MeasuredTM tm_h =
      measure_tm(config.bench, Polarization::horizontal, tm_opts);
  tm_opts.seed = derive_seed(config.seed, 0x7a12ULL);
  MeasuredTM tm_v = measure_tm(config.bench, Polarization::vertical, tm_opts);
  const TwoPhotonTM tm = assemble_two_photon(std::move(tm_h), std::move(tm_v));

  std::vector<SimilarityReport> reports;
  for (int n_det : config.detector_counts) {
    std::vector<Index> subset(static_cast<std::size_t>(n_det));
    for (int k = 0; k < n_det; ++k)
      subset[static_cast<std::size_t>(k)] = usable[static_cast<std::size_t>(k)];

    SimilarityReport report_dist, report_indist;
    report_dist.n_det = report_indist.n_det = n_det;
    report_dist.photon_class = PhotonClass::distinguishable;
    report_indist.photon_class = PhotonClass::indistinguishable;

    for (int trial = 0; trial < config.trials; ++trial) {
      const std::uint64_t trial_tag =
          (static_cast<std::uint64_t>(n_det) << 32) |
          static_cast<std::uint64_t>(trial);
      const TargetOperator target = random_operator(
          n_det, derive_seed(config.seed, trial_tag * 8 + 1));
      const SlmProgram program =
          synthesize_slm(tm, target, config.encoding, subset);
      const TargetOperator realized = realized_operator(
          config.bench, program, derive_seed(config.seed, trial_tag * 8 + 2));

      for (PhotonClass cls : {PhotonClass::distinguishable,
                              PhotonClass::indistinguishable}) {
        const bool indist = cls == PhotonClass::indistinguishable;
        const double gamma_exp =
            indist ? config.source.max_indistinguishability : 0.0;
        const OutcomeDistribution experiment_dist =
            coincidence_distribution(realized, gamma_exp);
        TimeTagStream stream = simulate_pairs(
            experiment_dist, config.source, config.array, config.duration_s,
            derive_seed(config.seed, trial_tag * 8 + (indist ? 3 : 4)));
        CoincidenceRecord rec =
            count_coincidences(stream, config.delta_t_s);
        if (config.correction != nullptr)
          rec = correct_coincidences(rec, *config.correction);

        const TargetOperator reference =
            config.theory_from_realized ? restrict_rows(realized, subset)
                                        : target;
        const OutcomeDistribution theory =
            coincidence_distribution(reference, indist ? 1.0 : 0.0);
        const double s = similarity(rec, theory, subset);
        (indist ? report_indist : report_dist).per_trial.push_back(s);
      }
    }

    for (SimilarityReport* rep : {&report_dist, &report_indist}) {
      double mean = 0.0;
      for (double s : rep->per_trial) mean += s;
      mean /= static_cast<double>(rep->per_trial.size());
      double var = 0.0;
      for (double s : rep->per_trial) var += (s - mean) * (s - mean);
      var = rep->per_trial.size() > 1
                ? var / static_cast<double>(rep->per_trial.size() - 1)
                : 0.0;
      rep->mean = mean;
      rep->stddev = std::sqrt(var);
      reports.push_back(std::move(*rep));
    }
  }
  return reports;
}

}  // namespace fiberqc
