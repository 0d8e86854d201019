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

#ifndef FIBERQC_LINALG_HPP
#define FIBERQC_LINALG_HPP

#include <Eigen/Dense>
#include <complex>

namespace fiberqc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline bool is_unitary(const ComplexMatrix& m, double tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  ComplexMatrix g = m.adjoint() * m;
  g -= ComplexMatrix::Identity(m.rows(), m.cols());
  return g.cwiseAbs().maxCoeff() <= tol;
}

inline bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

/// Squared-modulus overlap between two vectors, normalized to [0, 1]:
/// |<a,b>|^2 / (|a|^2 |b|^2). Returns 0 if either vector is null.
inline double column_fidelity(const ComplexVector& a, const ComplexVector& b) {
  double na = a.squaredNorm();
  double nb = b.squaredNorm();
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return std::norm(a.dot(b)) / (na * nb);
}

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double phi) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  phi = std::fmod(phi, two_pi);
  if (phi <= -3.14159265358979323846) phi += two_pi;
  if (phi > 3.14159265358979323846) phi -= two_pi;
  return phi;
}

}  // namespace fiberqc

#endif  // FIBERQC_LINALG_HPP
