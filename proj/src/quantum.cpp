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

#include "fiberqc/quantum.hpp"

#include <cmath>

#include "fiberqc/error.hpp"

namespace fiberqc {

void PhotonPairSource::validate() const {
  require_parameter(pair_rate_hz >= 0.0, "pair rate must be >= 0");
  require_parameter(
      max_indistinguishability >= 0.0 && max_indistinguishability <= 1.0,
      "max indistinguishability must lie in [0, 1]");
  require_parameter(coherence_sigma_s > 0.0, "coherence sigma must be > 0");
}

double indistinguishability(const PhotonPairSource& source, double delay_s) {
  source.validate();
  const double x = delay_s / source.coherence_sigma_s;
  return source.max_indistinguishability * std::exp(-0.5 * x * x);
}

double OutcomeDistribution::prob(Index i, Index j) const {
  if (i > j) std::swap(i, j);
  return pair_probs(pack(i, j));
}

double& OutcomeDistribution::prob_ref(Index i, Index j) {
  if (i > j) std::swap(i, j);
  return pair_probs(pack(i, j));
}

void OutcomeDistribution::validate(double tol) const {
  require_dimension(n_det >= 1, "distribution needs at least one detector");
  require_dimension(pair_probs.size() == packed_size(n_det),
                    "packed probability size mismatch");
  double total = loss_prob;
  for (Index k = 0; k < pair_probs.size(); ++k) {
    if (pair_probs(k) < -tol || !std::isfinite(pair_probs(k)))
      raise(ErrorCode::invalid_distribution,
            "pair probabilities must be >= 0 and finite");
    total += pair_probs(k);
  }
  if (loss_prob < -tol)
    raise(ErrorCode::invalid_distribution, "loss probability must be >= 0");
  if (std::abs(total - 1.0) > tol)
    raise(ErrorCode::invalid_distribution,
          "probabilities plus loss must sum to 1");
}

OutcomeDistribution coincidence_distribution(const TargetOperator& op,
                                             double gamma) {
  op.validate();
  require_parameter(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");

  const Index n = op.n_det();
  OutcomeDistribution dist;
  dist.n_det = n;
  dist.pair_probs = RealVector::Zero(OutcomeDistribution::packed_size(n));

  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      double p;
      if (i == j) {
        p = (1.0 + gamma) * std::norm(op.column_h(i) * op.column_v(i));
      } else {
        const Complex a = op.column_h(i) * op.column_v(j);
        const Complex b = op.column_h(j) * op.column_v(i);
        p = std::norm(a) + std::norm(b) +
            2.0 * gamma * (a * std::conj(b)).real();
      }
      dist.pair_probs(dist.pack(i, j)) = p;
      total += p;
    }
  }

  if (total > 1.0) {
    // Columns individually normalized but jointly super-unitary: rescale to
    // a proper distribution (similarity metrics are scale-invariant).
    dist.pair_probs /= total;
    dist.loss_prob = 0.0;
  } else {
    dist.loss_prob = 1.0 - total;
  }
  dist.validate();
  return dist;
}

HomScan hom_scan(const TargetOperator& op, const PhotonPairSource& source,
                 const std::vector<double>& delays_s, double acquisition_s) {
  require_parameter(!delays_s.empty(), "hom_scan needs at least one delay");
  require_parameter(acquisition_s > 0.0, "acquisition time must be > 0");
  source.validate();

  const Index n = op.n_det();
  HomScan scan;
  scan.delays_s = delays_s;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      scan.curves.push_back(HomCurve{i, j, {}});

  const double pairs_total = source.pair_rate_hz * acquisition_s;
  for (double tau : delays_s) {
    OutcomeDistribution dist =
        coincidence_distribution(op, indistinguishability(source, tau));
    std::size_t c = 0;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        scan.curves[c++].counts.push_back(pairs_total * dist.prob(i, j));
  }
  return scan;
}

double visibility(double c_far, double c_zero) {
  if (c_far <= 0.0)
    raise(ErrorCode::undefined_visibility,
          "visibility undefined for a zero baseline");
  return (c_far - c_zero) / c_far;
}

}  // namespace fiberqc
