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

#include "fiberqc/tagproc.hpp"

#include <cmath>
#include <deque>

#include "fiberqc/error.hpp"
#include "fiberqc/rng.hpp"

namespace fiberqc {

RealVector count_singles(const TimeTagStream& stream) {
  require_parameter(stream.duration_s > 0.0, "stream duration must be > 0");
  stream.validate();
  RealVector counts = RealVector::Zero(stream.n_pix);
  for (const auto& tag : stream.events) counts(tag.pixel) += 1.0;
  return counts / stream.duration_s;
}

CoincidenceRecord count_coincidences(const TimeTagStream& stream,
                                     double delta_t_s) {
  require_parameter(delta_t_s > 0.0, "coincidence window must be > 0");
  require_parameter(stream.duration_s > 0.0, "stream duration must be > 0");
  require_dimension(stream.n_pix >= 1 && stream.n_pix <= 64,
                    "coincidence counting supports up to 64 pixels");
  stream.validate();

  CoincidenceRecord rec;
  rec.delta_t_s = delta_t_s;
  rec.duration_s = stream.duration_s;
  rec.singles_rate = count_singles(stream);
  rec.counts = RealMatrix::Zero(stream.n_pix, stream.n_pix);

  // Window test on the 1 ps grid: 2|dt| <= delta_t (exact integers).
  const auto window_ps =
      static_cast<std::int64_t>(std::llround(delta_t_s * 1e12));

  struct Open {
    std::int64_t time_ps;
    std::uint16_t pixel;
    std::uint64_t paired;  // bitmask of pixels already matched to this event
  };
  std::deque<Open> open;

  for (const auto& tag : stream.events) {
    while (!open.empty() && (tag.time_ps - open.front().time_ps) * 2 > window_ps)
      open.pop_front();

    std::uint64_t my_paired = 0;
    // Scan newest-first so each event greedily matches its nearest partner.
    for (auto it = open.rbegin(); it != open.rend(); ++it) {
      if (it->pixel == tag.pixel) continue;
      const std::uint64_t mine = 1ULL << tag.pixel;
      const std::uint64_t theirs = 1ULL << it->pixel;
      if ((my_paired & theirs) || (it->paired & mine)) continue;
      my_paired |= theirs;
      it->paired |= mine;
      rec.counts(it->pixel, tag.pixel) += 1.0;
      rec.counts(tag.pixel, it->pixel) += 1.0;
    }
    open.push_back(Open{tag.time_ps, tag.pixel, my_paired});
  }
  return rec;
}

std::vector<CoincidenceRecord> hom_scan_measure(
    const PipelineConfig& config, const std::vector<double>& delays_s) {
  require_parameter(!delays_s.empty(), "delay list must not be empty");
  require_dimension(config.bench.n_det == config.array.n_pix,
                    "bench detectors and array pixels must match");

  SlmProgram program = synthesize_slm(config.tm, config.target,
                                      config.encoding, config.detectors);
  TargetOperator realized = realized_operator(
      config.bench, program, derive_seed(config.seed, 0xfeedULL));

  std::vector<CoincidenceRecord> records;
  records.reserve(delays_s.size());
  for (std::size_t k = 0; k < delays_s.size(); ++k) {
    PhotonPairSource delayed = config.source;
    delayed.delay_s = delays_s[k];
    const double gamma = indistinguishability(delayed, delays_s[k]);
    OutcomeDistribution dist = coincidence_distribution(realized, gamma);
    TimeTagStream stream =
        simulate_pairs(dist, delayed, config.array, config.duration_s,
                       derive_seed(config.seed, k));
    records.push_back(count_coincidences(stream, config.delta_t_s));
  }
  return records;
}

}  // namespace fiberqc
