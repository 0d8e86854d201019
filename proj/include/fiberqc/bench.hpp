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

#ifndef FIBERQC_BENCH_HPP
#define FIBERQC_BENCH_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "fiberqc/image.hpp"
#include "fiberqc/linalg.hpp"

namespace fiberqc {

/// Phase pattern on the SLM mode grid, one entry per Fourier mode
/// (equivalently per macro-pixel of the displayed hologram). Values are
/// radians in [0, 2pi).
struct PhaseMask {
  RealVector phases;

  Index n_modes() const { return phases.size(); }

  /// Wraps every entry into [0, 2pi).
  void wrap();
};

enum class Polarization { horizontal, vertical };

/// Virtual optical bench: ground-truth dual-polarization fiber transmission
/// matrices, a phase-only SLM per polarization half, and a static internal
/// reference channel for interferometric measurements.
///
/// The column index of the transmission matrices is the SLM Fourier-mode
/// index: displaying the m-th linear phase ramp injects unit power into
/// column m, so masks, amplitude vectors and the matrices all share one
/// basis.
struct BenchConfig {
  Index n_modes = 64;
  Index n_det = 23;
  double loss_fraction = 0.0;
  double slm_phase_error_sigma = 0.0;  // radians, applied at propagation
  std::uint64_t seed = 0;

  ComplexMatrix transmission_h;  // n_det x n_modes ground truth
  ComplexMatrix transmission_v;
  ComplexVector reference_field;  // n_det, entries nonzero

  const ComplexMatrix& transmission(Polarization pol) const {
    return pol == Polarization::horizontal ? transmission_h : transmission_v;
  }

  void validate() const;
};

/// Builds a bench whose per-polarization transmission matrices are the first
/// n_det rows of independent Haar unitaries, scaled by sqrt(1 - loss). The
/// reference field is a fixed complex Gaussian vector.
BenchConfig make_bench(Index n_modes, Index n_det, double loss,
                       std::uint64_t seed);

struct PropagateOptions {
  /// Adds the bench reference field to the detector fields (interferometric
  /// acquisition mode used by the phase-stepping measurement).
  bool add_reference = false;
  /// Extra global phase applied to the probe field before the fiber.
  double probe_phase = 0.0;
  /// Stream for the per-mode SLM phase error when the bench is configured
  /// with slm_phase_error_sigma > 0; propagation is pure given this seed.
  std::uint64_t noise_seed = 0;
};

/// Propagates one polarization half: field = T * (amp .* exp(i*phases)),
/// with optional per-mode phase error and reference addition.
ComplexVector propagate_pol(const BenchConfig& bench, Polarization pol,
                            const PhaseMask& mask, const RealVector& amps,
                            const PropagateOptions& opts = {});

/// Propagates both halves; the SLM noise streams of the two halves are
/// derived independently from opts.noise_seed.
std::pair<ComplexVector, ComplexVector> propagate(
    const BenchConfig& bench, const PhaseMask& mask_h, const PhaseMask& mask_v,
    const RealVector& amp_h, const RealVector& amp_v,
    const PropagateOptions& opts = {});

/// Renders detector output intensities as camera spots: each detector
/// contributes |field_i|^2 times an unnormalized Gaussian of width psf_sigma
/// centered at its position (in pixels), on top of a constant background.
Image render_camera(const ComplexVector& fields,
                    const std::vector<Eigen::Vector2d>& positions_px,
                    double psf_sigma_px, int width, int height,
                    double background = 0.0);

}  // namespace fiberqc

#endif  // FIBERQC_BENCH_HPP
