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

#ifndef FIBERQC_TAGPROC_HPP
#define FIBERQC_TAGPROC_HPP

#include <cstdint>
#include <vector>

#include "fiberqc/spad.hpp"
#include "fiberqc/tm_recon.hpp"

namespace fiberqc {

/// Singles rates and pairwise coincidence counts of one acquisition.
struct CoincidenceRecord {
  RealVector singles_rate;  // counts/s per pixel
  RealMatrix counts;        // symmetric, zero diagonal
  double delta_t_s = 0.0;
  double duration_s = 0.0;

  Index n_pix() const { return singles_rate.size(); }
};

/// Events per pixel divided by the stream duration.
RealVector count_singles(const TimeTagStream& stream);

/// Windowed coincidence counting: two events on distinct pixels coincide
/// when |t_i - t_j| <= delta_t/2; within each pixel pair the pairing is
/// greedy nearest-match and one-to-one (no double counting).
CoincidenceRecord count_coincidences(const TimeTagStream& stream,
                                     double delta_t_s);

/// End-to-end measurement configuration: synthesize the target on the
/// measured TM, realize it through the ground-truth bench, and detect with
/// the array model. `detectors` lists the bench rows (= pixel ids) the
/// target columns address.
struct PipelineConfig {
  BenchConfig bench;
  TwoPhotonTM tm;
  TargetOperator target;
  std::vector<Index> detectors;  // empty = rows 0..n_det-1
  Encoding encoding = Encoding::phase_only;
  PhotonPairSource source;
  DetectorArray array;
  double duration_s = 100.0;
  double delta_t_s = 1e-9;
  std::uint64_t seed = 0;
};

/// Runs the full chain at every source delay: one synthesized program, one
/// realized operator, fresh Monte Carlo detection per delay.
std::vector<CoincidenceRecord> hom_scan_measure(
    const PipelineConfig& config, const std::vector<double>& delays_s);

}  // namespace fiberqc

#endif  // FIBERQC_TAGPROC_HPP
