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

#ifndef FIBERQC_METRICS_HPP
#define FIBERQC_METRICS_HPP

#include <cstdint>
#include <vector>

#include "fiberqc/calibration.hpp"
#include "fiberqc/tagproc.hpp"

namespace fiberqc {

/// Bhattacharyya-type similarity between two coincidence distributions over
/// the detector subset `pixels`:
///   S = (sum_{a<b} sqrt(E_ab T_ab))^2 / (sum E * sum T),
/// scale-invariant, diagonal excluded. Throws undefined_similarity if either
/// side is all zero on the subset.
double similarity(const RealMatrix& counts_e, const RealMatrix& counts_t,
                  const std::vector<Index>& pixels);

/// Experimental record against an analytic distribution whose slot k labels
/// pixel pixels[k].
double similarity(const CoincidenceRecord& experiment,
                  const OutcomeDistribution& theory,
                  const std::vector<Index>& pixels);

double similarity(const CoincidenceRecord& experiment,
                  const CoincidenceRecord& theory,
                  const std::vector<Index>& pixels);

enum class PhotonClass { distinguishable, indistinguishable };

const char* photon_class_name(PhotonClass c);

/// Scalability-study configuration: one bench and detector array, a list of
/// operator sizes, and the per-trial Monte Carlo acquisition settings.
struct StudyConfig {
  BenchConfig bench;    // bench.n_det must equal array.n_pix
  DetectorArray array;
  PhotonPairSource source;
  Encoding encoding = Encoding::phase_only;
  double tm_photon_scale = 0.0;  // 0 = noiseless TM measurement
  double duration_s = 100.0;
  double delta_t_s = 1e-9;
  std::vector<int> detector_counts;
  int trials = 100;
  std::uint64_t seed = 0;
  const CrosstalkModel* correction = nullptr;  // optional background model
  /// Compare against the realized operator instead of the ideal target
  /// (diagnostic mode).
  bool theory_from_realized = false;
};

struct SimilarityReport {
  int n_det = 0;
  PhotonClass photon_class = PhotonClass::distinguishable;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> per_trial;
};

/// For every operator size and trial: draw a random operator on the first
/// n_det usable pixels, synthesize and realize it, simulate acquisitions for
/// both photon classes (source gamma0 and gamma=0), count, optionally
/// correct, and compare with the analytic distribution of the ideal target
/// (gamma 1 and 0 respectively). The TM is measured once per study.
std::vector<SimilarityReport> random_circuit_study(const StudyConfig& config);

}  // namespace fiberqc

#endif  // FIBERQC_METRICS_HPP
