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

#ifndef FIBERQC_OPERATORS_HPP
#define FIBERQC_OPERATORS_HPP

#include <cstdint>

#include "fiberqc/linalg.hpp"

namespace fiberqc {

/// An N x 2 linear operator on the two-photon input, stored as the pair of
/// output columns addressed by the horizontally / vertically polarized input
/// photon respectively. Columns are kept at norm <= 1; any norm deficit is
/// interpreted as photon loss downstream.
struct TargetOperator {
  ComplexVector column_h;
  ComplexVector column_v;

  Index n_det() const { return column_h.size(); }

  /// n_det x 2 matrix [column_h, column_v].
  ComplexMatrix as_matrix() const;

  /// Throws on inconsistent column lengths or non-finite entries.
  void validate() const;
};

/// Haar-distributed random unitary of size n, sampled by QR decomposition of
/// a complex Ginibre matrix with the R-diagonal phase fix (without the fix
/// the QR sign convention would bias the distribution).
ComplexMatrix haar_unitary(Index n, std::uint64_t seed);

/// Alternating-sign interference operator: column_v has all entries
/// 1/sqrt(n_det), column_h entry i (1-based) is (-1)^i/sqrt(n_det). Columns
/// are orthogonal for even n_det.
TargetOperator sylvester_operator(Index n_det);

/// Random operator: each entry has real and imaginary parts drawn uniformly
/// from [-1, 1], then each column is rescaled to unit norm.
TargetOperator random_operator(Index n_det, std::uint64_t seed);

/// Operator that routes both photons to a single detector; used for focusing
/// and detector-localization runs.
TargetOperator focusing_operator(Index n_det, Index detector);

/// Permanent of a square complex matrix via Ryser's formula with Gray-code
/// subset updates, O(2^n n). Intended as an oracle for small matrices; n is
/// capped at 24 to keep runtime bounded.
Complex permanent(const ComplexMatrix& m);

}  // namespace fiberqc

#endif  // FIBERQC_OPERATORS_HPP
