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

#include "fiberqc/presets.hpp"

#include "fiberqc/rng.hpp"

namespace fiberqc::preset {

BenchConfig bench(std::uint64_t seed) {
  BenchConfig b = make_bench(kNModes, kNPix, kLossFraction, seed);
  b.slm_phase_error_sigma = kSlmPhaseErrorSigma;
  return b;
}

DetectorArray array() {
  return DetectorArray::with_defaults(static_cast<int>(kNPix), kEfficiency,
                                      kDarkRate, kBetaNearest);
}

PhotonPairSource source() {
  PhotonPairSource s;
  s.pair_rate_hz = kPairRate;
  s.max_indistinguishability = kGamma0;
  s.coherence_sigma_s = kCoherenceSigma;
  s.delay_s = 0.0;
  return s;
}

StudyConfig study(std::uint64_t seed) {
  StudyConfig config;
  config.bench = bench(derive_seed(seed, 0xbe9cULL));
  config.array = array();
  config.source = source();
  config.encoding = Encoding::phase_only;
  config.tm_photon_scale = kTmPhotonScale;
  config.duration_s = kDuration;
  config.delta_t_s = kDeltaT;
  config.seed = seed;
  return config;
}

}  // namespace fiberqc::preset
