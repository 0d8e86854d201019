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

#ifndef FIBERQC_QUANTUM_HPP
#define FIBERQC_QUANTUM_HPP

#include <vector>

#include "fiberqc/operators.hpp"

namespace fiberqc {

/// Photon-pair source with partial distinguishability. The pairwise overlap
/// of the two photons' wavepackets enters all statistics as a single scalar
/// gamma in [0, 1]; a relative delay reduces it as a Gaussian.
struct PhotonPairSource {
  double pair_rate_hz = 1000.0;
  double max_indistinguishability = 0.95;  // overlap at zero delay
  double coherence_sigma_s = 150e-15;      // wavepacket width parameter
  double delay_s = 0.0;

  void validate() const;
};

/// gamma(tau) = gamma0 * exp(-tau^2 / (2 sigma^2)).
double indistinguishability(const PhotonPairSource& source, double delay_s);

/// Two-photon outcome distribution over detector pairs (i <= j), stored as a
/// packed upper triangle, plus the probability that at least one photon is
/// lost. Probabilities sum to 1 with the loss term.
struct OutcomeDistribution {
  Index n_det = 0;
  RealVector pair_probs;  // packed (i <= j), size n_det*(n_det+1)/2
  double loss_prob = 0.0;

  static Index packed_size(Index n) { return n * (n + 1) / 2; }

  /// Index of pair (i, j) with i <= j in the packed triangle.
  Index pack(Index i, Index j) const {
    return i * n_det - i * (i - 1) / 2 + (j - i);
  }

  double prob(Index i, Index j) const;
  double& prob_ref(Index i, Index j);

  void validate(double tol = 1e-10) const;
};

/// Output statistics of the two-photon state through an N x 2 operator with
/// partial distinguishability gamma:
///   i < j:  P_ij = |L_i1 L_j2|^2 + |L_i2 L_j1|^2
///                  + 2 gamma Re[L_i1 L_j2 conj(L_i2 L_j1)]
///   i = j:  P_ii = (1 + gamma) |L_i1 L_i2|^2
/// Any weight total above 1 (possible for targets whose columns are
/// normalized but not jointly sub-unitary) is rescaled away; otherwise the
/// deficit becomes loss_prob.
OutcomeDistribution coincidence_distribution(const TargetOperator& op,
                                             double gamma);

/// One detector pair's analytic interference scan.
struct HomCurve {
  Index i = 0;
  Index j = 0;
  std::vector<double> counts;  // expected coincidences per delay
};

struct HomScan {
  std::vector<double> delays_s;
  std::vector<HomCurve> curves;  // all pairs i < j
};

/// Expected coincidence counts per pair as a function of the source delay:
/// coincidence_distribution(op, gamma(tau)) scaled by pair_rate * duration.
HomScan hom_scan(const TargetOperator& op, const PhotonPairSource& source,
                 const std::vector<double>& delays_s, double acquisition_s);

/// V = (c_far - c_zero) / c_far; dips give positive V, peaks negative.
double visibility(double c_far, double c_zero);

}  // namespace fiberqc

#endif  // FIBERQC_QUANTUM_HPP
