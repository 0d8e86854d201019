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

#include "fiberqc/operators.hpp"

#include <bit>
#include <cmath>

#include "fiberqc/error.hpp"
#include "fiberqc/rng.hpp"

namespace fiberqc {

ComplexMatrix TargetOperator::as_matrix() const {
  ComplexMatrix m(n_det(), 2);
  m.col(0) = column_h;
  m.col(1) = column_v;
  return m;
}

void TargetOperator::validate() const {
  require_dimension(column_h.size() >= 1, "operator needs at least one row");
  require_dimension(column_h.size() == column_v.size(),
                    "operator columns differ in length");
  if (!column_h.allFinite() || !column_v.allFinite())
    raise(ErrorCode::invalid_parameter, "operator has non-finite entries");
}

ComplexMatrix haar_unitary(Index n, std::uint64_t seed) {
  require_dimension(n >= 1, "haar_unitary: n must be >= 1");
  Rng rng = make_rng(seed);
  ComplexMatrix g(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) g(i, j) = gaussian_complex(rng);

  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the gauge: make the R diagonal real-positive so Q is Haar rather
  // than biased by the Householder sign convention.
  for (Index j = 0; j < n; ++j) {
    Complex d = r(j, j);
    double mag = std::abs(d);
    Complex phase = mag > 0.0 ? d / mag : Complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

TargetOperator sylvester_operator(Index n_det) {
  require_dimension(n_det >= 1, "sylvester_operator: n_det must be >= 1");
  double inv = 1.0 / std::sqrt(static_cast<double>(n_det));
  TargetOperator op;
  op.column_h = ComplexVector(n_det);
  op.column_v = ComplexVector::Constant(n_det, Complex(inv, 0.0));
  for (Index i = 0; i < n_det; ++i) {
    // Detector index is 1-based, so row 0 carries (-1)^1 = -1.
    double sign = (i % 2 == 0) ? -1.0 : 1.0;
    op.column_h(i) = Complex(sign * inv, 0.0);
  }
  return op;
}

TargetOperator random_operator(Index n_det, std::uint64_t seed) {
  require_dimension(n_det >= 1, "random_operator: n_det must be >= 1");
  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TargetOperator op;
  op.column_h = ComplexVector(n_det);
  op.column_v = ComplexVector(n_det);
  for (auto* col : {&op.column_h, &op.column_v}) {
    for (Index i = 0; i < n_det; ++i) {
      double re = u(rng);
      double im = u(rng);
      (*col)(i) = Complex(re, im);
    }
    double norm = col->norm();
    if (norm > 0.0) *col /= norm;
  }
  return op;
}

TargetOperator focusing_operator(Index n_det, Index detector) {
  require_dimension(n_det >= 1, "focusing_operator: n_det must be >= 1");
  require_parameter(detector >= 0 && detector < n_det,
                    "focusing_operator: detector index out of range");
  TargetOperator op;
  op.column_h = ComplexVector::Zero(n_det);
  op.column_v = ComplexVector::Zero(n_det);
  op.column_h(detector) = 1.0;
  op.column_v(detector) = 1.0;
  return op;
}

Complex permanent(const ComplexMatrix& m) {
  require_dimension(m.rows() == m.cols(), "permanent: matrix must be square");
  const Index n = m.rows();
  require_dimension(n >= 1, "permanent: empty matrix");
  require_dimension(n <= 24, "permanent: matrix too large for exact formula");
  if (n == 1) return m(0, 0);

  // Ryser with Gray-code updates: maintain per-row sums over the current
  // column subset, flipping one column per step.
  ComplexVector row_sum = ComplexVector::Zero(n);
  Complex total(0.0, 0.0);
  const std::uint64_t n_subsets = (1ULL << n) - 1;
  std::uint64_t gray_prev = 0;
  for (std::uint64_t k = 1; k <= n_subsets; ++k) {
    std::uint64_t gray = k ^ (k >> 1);
    std::uint64_t changed = gray ^ gray_prev;
    int col = std::countr_zero(changed);
    if (gray & changed)
      row_sum += m.col(col);
    else
      row_sum -= m.col(col);
    gray_prev = gray;

    Complex prod(1.0, 0.0);
    for (Index i = 0; i < n; ++i) prod *= row_sum(i);
    int bits = std::popcount(gray);
    double subset_sign = ((n - bits) % 2 == 0) ? 1.0 : -1.0;
    total += subset_sign * prod;
  }
  return total;
}

}  // namespace fiberqc
