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

#ifndef FIBERQC_SPAD_HPP
#define FIBERQC_SPAD_HPP

#include <cstdint>
#include <vector>

#include "fiberqc/linalg.hpp"
#include "fiberqc/quantum.hpp"

namespace fiberqc {

/// Positions of n_pix detectors on a centered hexagonal lattice with the
/// given pitch: center first, then complete rings outward (angle-ordered
/// within each ring), truncating the outermost ring if needed.
std::vector<Eigen::Vector2d> hex_layout(int n_pix, double pitch);

/// Cross-talk probability matrix decaying with distance as
/// beta_nn / (d / pitch)^2; diagonal is zero.
RealMatrix inverse_square_crosstalk(const std::vector<Eigen::Vector2d>& positions,
                                    double pitch, double beta_nn);

/// Single-photon avalanche diode array model: hexagonal geometry, per-pixel
/// efficiency and dark rate, non-paralyzable dead time, Gaussian timing
/// jitter, and optical cross-talk between pixels.
struct DetectorArray {
  int n_pix = 23;
  double pitch_um = 23.0;
  std::vector<Eigen::Vector2d> positions_um;
  RealVector efficiency;        // per pixel, in [0, 1]
  RealVector dark_rate_cps;     // per pixel, capped at 100 counts/s
  double dead_time_s = 50e-9;   // non-paralyzable
  double jitter_fwhm_s = 120e-12;
  RealMatrix crosstalk_true;    // n_pix x n_pix, diagonal 0
  std::vector<int> disabled_pixels;

  /// Default 23-pixel array with 23 um pitch, nearest-neighbor cross-talk
  /// 1e-3, uniform efficiency/dark rate, and the last pixel disabled (the
  /// customary noisy-pixel exclusion).
  static DetectorArray with_defaults(int n_pix = 23, double efficiency = 0.8,
                                     double dark_rate_cps = 100.0,
                                     double beta_nn = 1e-3);

  bool is_disabled(int pixel) const;
  std::vector<int> enabled() const;

  void validate() const;
};

/// One detection event: pixel id and timestamp on a 1 ps grid.
struct TimeTag {
  std::int64_t time_ps = 0;
  std::uint16_t pixel = 0;
};

/// Time-sorted detection record of one acquisition.
struct TimeTagStream {
  std::vector<TimeTag> events;
  int n_pix = 0;
  double duration_s = 0.0;

  /// Throws invalid_stream if timestamps decrease or pixel ids are out of
  /// range.
  void validate() const;
};

/// Monte Carlo acquisition of photon pairs: pair arrivals are Poisson at the
/// source rate; each pair lands on a detector pair drawn from `dist`
/// (whose indices are pixel ids; the loss outcome discards the pair), each
/// photon survives its pixel's efficiency, timestamps get Gaussian jitter,
/// dark counts are added per pixel, dead time removes too-close same-pixel
/// events, and every accepted event may trigger one cross-talk event on a
/// neighboring pixel.
TimeTagStream simulate_pairs(const OutcomeDistribution& dist,
                             const PhotonPairSource& source,
                             const DetectorArray& array, double duration_s,
                             std::uint64_t seed);

/// Same detector physics driven by classical per-pixel intensities
/// (independent Poisson streams at the given rates) instead of photon pairs.
TimeTagStream simulate_classical(const RealVector& rates_cps,
                                 const DetectorArray& array, double duration_s,
                                 std::uint64_t seed);

}  // namespace fiberqc

#endif  // FIBERQC_SPAD_HPP
