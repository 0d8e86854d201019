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

#ifndef FIBERQC_CALIBRATION_HPP
#define FIBERQC_CALIBRATION_HPP

#include <vector>

#include "fiberqc/image.hpp"
#include "fiberqc/tagproc.hpp"

namespace fiberqc {

/// Classical coincidence background model
///   C_ij = alpha_ij n_i n_j dt T + beta_ij n_i T + beta_ji n_j T
/// with accidental coefficients alpha (symmetric) and cross-talk
/// coefficients beta (asymmetric).
struct CrosstalkModel {
  RealMatrix alpha;
  RealMatrix beta;

  static CrosstalkModel zeros(Index n_pix);
  void validate() const;
};

/// Fit diagnostics alongside the model: per-coefficient standard errors
/// (heteroscedasticity-consistent, since count noise grows with intensity)
/// and the number of negative estimates clamped to zero.
struct CrosstalkFit {
  CrosstalkModel model;
  RealMatrix alpha_stderr;
  RealMatrix beta_stderr;
  int clamped = 0;
};

/// Per-pair ordinary least squares of C_ij against
/// [n_i n_j dt T, n_i T, n_j T] over a set of classical-light acquisitions
/// with varying intensities. Throws underdetermined_fit when a pair's design
/// matrix is rank-deficient.
CrosstalkFit fit_crosstalk(const std::vector<CoincidenceRecord>& records,
                           double delta_t_s);

/// Subtracts the modeled classical background from each pair count,
/// clamping at zero; singles rates are untouched.
CoincidenceRecord correct_coincidences(const CoincidenceRecord& rec,
                                       const CrosstalkModel& model);

/// Result of a 2D Gaussian least-squares fit
///   A exp(-(x-x0)^2/2sx^2 - (y-y0)^2/2sy^2) + b.
struct Gaussian2DFit {
  double x0 = 0.0, y0 = 0.0;
  double sigma_x = 0.0, sigma_y = 0.0;
  double amplitude = 0.0, offset = 0.0;
  int iterations = 0;
};

/// Levenberg-Marquardt fit initialized from the background-subtracted
/// centroid and second moments. Throws localization_failure on constant
/// images or divergence.
Gaussian2DFit fit_gaussian2d(const Image& image);

/// Per-detector spot localization with hexagonal-grid consistency checking.
struct DetectorLocalization {
  std::vector<Gaussian2DFit> fits;  // entry valid iff ok[k]
  std::vector<bool> ok;
  double spacing_cv = 0.0;   // coefficient of variation of NN spacings
  bool grid_consistent = false;  // spacing_cv < 0.10
};

/// Fits one Gaussian per focus image; failed fits are flagged rather than
/// fatal. Grid consistency uses nearest-neighbor distances among the
/// successfully localized spots.
DetectorLocalization localize_detectors(const std::vector<Image>& focus_images,
                                        int expected_n);

}  // namespace fiberqc

#endif  // FIBERQC_CALIBRATION_HPP
