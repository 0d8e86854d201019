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

#ifndef FIBERQC_PRESETS_HPP
#define FIBERQC_PRESETS_HPP

#include "fiberqc/metrics.hpp"

namespace fiberqc::preset {

// Frozen "benchtop" noise preset: the full hardware noise budget of a
// desk-scale run (TM shot noise, SLM phase error, partially distinguishable
// source, detector dark counts / dead time / jitter / cross-talk). The
// values were calibrated once against the reference similarity endpoints
// and are pinned here as regression baselines — do not retune casually.

inline constexpr Index kNModes = 64;
inline constexpr Index kNPix = 23;
inline constexpr double kLossFraction = 0.1;
inline constexpr double kSlmPhaseErrorSigma = 0.3;  // radians
inline constexpr double kTmPhotonScale = 25.0;      // photons per frame unit
inline constexpr double kPairRate = 1000.0;         // pairs/s
inline constexpr double kGamma0 = 0.95;             // source overlap at 0 delay
inline constexpr double kCoherenceSigma = 150e-15;  // s
inline constexpr double kEfficiency = 0.8;
inline constexpr double kDarkRate = 100.0;          // counts/s
inline constexpr double kBetaNearest = 1e-3;
inline constexpr double kDeltaT = 1e-9;             // coincidence window, s
inline constexpr double kDuration = 100.0;          // s per acquisition

/// 23-detector bench at the preset noise levels.
BenchConfig bench(std::uint64_t seed);

DetectorArray array();

PhotonPairSource source();

/// Fully-populated study configuration (detector_counts left to the caller).
StudyConfig study(std::uint64_t seed);

}  // namespace fiberqc::preset

#endif  // FIBERQC_PRESETS_HPP
