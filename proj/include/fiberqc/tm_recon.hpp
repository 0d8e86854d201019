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

#ifndef FIBERQC_TM_RECON_HPP
#define FIBERQC_TM_RECON_HPP

#include <cstdint>
#include <vector>

#include "fiberqc/bench.hpp"
#include "fiberqc/operators.hpp"

namespace fiberqc {

/// Transmission matrix recovered by phase-stepping interferometry.
///
/// Each row carries an unknown per-detector complex factor conj(R_i)
/// inherited from the internal reference (the reference ambiguity). When
/// reference_normalized is set the rows were divided by the reference
/// amplitude estimated from a reference-only acquisition, leaving a
/// unit-modulus phase factor only.
struct MeasuredTM {
  ComplexMatrix t;  // n_det x n_modes
  bool reference_normalized = false;

  Index n_det() const { return t.rows(); }
  Index n_modes() const { return t.cols(); }
};

/// The n_modes orthogonal probe masks: linear phase ramps of varying
/// inclination and orientation on the SLM macro-pixel grid (a 2D DFT basis).
/// Displaying ramp m injects unit power into Fourier mode m, which is how
/// the bench's transmission-matrix columns are indexed.
std::vector<PhaseMask> phase_ramp_basis(Index n_modes);

struct MeasureOptions {
  int phase_steps = 4;  // fixed four-step scheme {0, pi/2, pi, 3pi/2}
  /// Expected photon counts per unit intensity per frame; 0 disables
  /// Poisson counting noise.
  double photon_scale = 0.0;
  /// Divide each row by the reference amplitude estimated from a
  /// reference-only acquisition (the standard normalization; leaves only a
  /// per-detector phase ambiguity).
  bool normalize_reference = true;
  std::uint64_t seed = 0;
};

/// Phase-stepping measurement of one polarization's transmission matrix:
/// for every Fourier mode the probe interferes with the static reference at
/// offsets {0, pi/2, pi, 3pi/2} and the complex entry is recovered as
///   t[i,m] = [(I(0) - I(pi)) + i(I(3pi/2) - I(pi/2))] / 4
///          = conj(R_i) * T_true[i,m].
MeasuredTM measure_tm(const BenchConfig& bench, Polarization pol,
                      const MeasureOptions& opts = {});

/// Paired single-polarization TMs forming the two-photon map: the output
/// amplitude tensor for input fields (E_h, E_v) is A_ij = out_h[i]*out_v[j].
struct TwoPhotonTM {
  MeasuredTM h;
  MeasuredTM v;

  Index n_det() const { return h.n_det(); }
  Index n_modes() const { return h.n_modes(); }

  const MeasuredTM& pol(Polarization p) const {
    return p == Polarization::horizontal ? h : v;
  }

  ComplexMatrix amplitude(const ComplexVector& in_h,
                          const ComplexVector& in_v) const;
};

TwoPhotonTM assemble_two_photon(MeasuredTM tm_h, MeasuredTM tm_v);

enum class Encoding { phase_only, complex_field };

/// SLM program realizing a target operator: one mask + amplitude vector per
/// polarization half.
struct SlmProgram {
  PhaseMask mask_h;
  PhaseMask mask_v;
  RealVector amp_h;
  RealVector amp_v;
  Encoding encoding = Encoding::phase_only;
};

/// Computes the SLM input fields E_in = t_pol^dagger * column_pol (phase
/// conjugation through the measured TM) and encodes them as displayable
/// masks. `detectors` selects which measured rows the target columns address
/// (empty = rows 0..n_det-1 in order). Phase-only encoding keeps unit
/// amplitudes; complex encoding returns |E_in| as amplitudes.
SlmProgram synthesize_slm(const TwoPhotonTM& tm, const TargetOperator& target,
                          Encoding encoding,
                          const std::vector<Index>& detectors = {});

/// Propagates a program through the ground-truth bench and returns the
/// realized operator, each column normalized to unit input power (so column
/// norms are <= 1 and the deficit is loss).
TargetOperator realized_operator(const BenchConfig& bench,
                                 const SlmProgram& program,
                                 std::uint64_t noise_seed = 0);

/// Restricts operator rows to the given detector subset, preserving order.
TargetOperator restrict_rows(const TargetOperator& op,
                             const std::vector<Index>& detectors);

}  // namespace fiberqc

#endif  // FIBERQC_TM_RECON_HPP
