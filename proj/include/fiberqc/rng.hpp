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

#ifndef FIBERQC_RNG_HPP
#define FIBERQC_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace fiberqc {

using Rng = std::mt19937_64;

/// Derives an independent child seed from a base seed and a stream index.
/// Uses the splitmix64 finalizer so adjacent (base, stream) pairs decorrelate.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Standard complex Gaussian: real and imaginary parts N(0, 1/2),
/// so E|z|^2 = 1.
inline std::complex<double> gaussian_complex(Rng& rng) {
  static thread_local std::normal_distribution<double> n01(0.0, 1.0);
  constexpr double inv_sqrt2 = 0.7071067811865475244;
  return {n01(rng) * inv_sqrt2, n01(rng) * inv_sqrt2};
}

inline double gaussian(Rng& rng, double sigma = 1.0) {
  std::normal_distribution<double> n(0.0, sigma);
  return n(rng);
}

inline double uniform01(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng);
}

}  // namespace fiberqc

#endif  // FIBERQC_RNG_HPP
