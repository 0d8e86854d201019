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

#include <doctest.h>

#include <cmath>

#include "fiberqc/bench.hpp"
#include "fiberqc/error.hpp"
#include "fiberqc/operators.hpp"
#include "fiberqc/rng.hpp"
#include "fiberqc/tm_recon.hpp"

using namespace fiberqc;

TEST_SUITE_BEGIN("bench");

namespace {

PhaseMask zero_mask(Index n) {
  PhaseMask mask;
  mask.phases = RealVector::Zero(n);
  return mask;
}

}  // namespace

TEST_CASE("1x1 lossless bench is unimodular") {
  const BenchConfig bench = make_bench(1, 1, 0.0, 5);
  CHECK(std::abs(std::abs(bench.transmission_h(0, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(bench.transmission_v(0, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(bench.reference_field(0)) > 1e-6);
}

TEST_CASE("row norms follow the loss fraction") {
  const BenchConfig lossless = make_bench(64, 23, 0.0, 6);
  for (Index i = 0; i < 23; ++i) {
    CHECK(lossless.transmission_h.row(i).norm() <= 1.0 + 1e-12);
    CHECK(lossless.transmission_v.row(i).norm() <= 1.0 + 1e-12);
  }

  // Rows of a truncated unitary have unit norm, so the loss scaling fixes
  // every squared row norm at exactly 1 - loss.
  const BenchConfig lossy = make_bench(64, 23, 0.5, 6);
  for (Index i = 0; i < 23; ++i) {
    CHECK(std::abs(lossy.transmission_h.row(i).squaredNorm() - 0.5) < 1e-10);
    CHECK(std::abs(lossy.transmission_v.row(i).squaredNorm() - 0.5) < 1e-10);
  }
}

TEST_CASE("reference field entries are nonzero") {
  const BenchConfig bench = make_bench(32, 23, 0.1, 77);
  for (Index i = 0; i < 23; ++i)
    CHECK(std::abs(bench.reference_field(i)) > 1e-6);
}

TEST_CASE("make_bench rejects more detectors than modes") {
  try {
    make_bench(4, 5, 0.0, 1);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_dimension);
  }
}

TEST_CASE("propagation through a 1x1 bench returns the raw coefficient") {
  const BenchConfig bench = make_bench(1, 1, 0.0, 9);
  const ComplexVector field = propagate_pol(
      bench, Polarization::horizontal, zero_mask(1), RealVector::Ones(1));
  CHECK(std::abs(field(0) - bench.transmission_h(0, 0)) < 1e-12);
}

TEST_CASE("propagation is linear in the input amplitudes") {
  const BenchConfig bench = make_bench(16, 8, 0.2, 10);
  PhaseMask mask;
  Rng rng = make_rng(3);
  mask.phases = RealVector(16);
  RealVector a(16), b(16);
  for (Index m = 0; m < 16; ++m) {
    mask.phases(m) = uniform01(rng) * 6.283185307179586;
    a(m) = uniform01(rng);
    b(m) = uniform01(rng);
  }

  const ComplexVector fa =
      propagate_pol(bench, Polarization::vertical, mask, a);
  const ComplexVector fb =
      propagate_pol(bench, Polarization::vertical, mask, b);
  const ComplexVector fsum =
      propagate_pol(bench, Polarization::vertical, mask, a + b);
  CHECK((fsum - fa - fb).cwiseAbs().maxCoeff() < 1e-12);

  const ComplexVector fdouble =
      propagate_pol(bench, Polarization::vertical, mask, 2.0 * a);
  CHECK((fdouble - 2.0 * fa).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("lossless square bench conserves power") {
  const BenchConfig bench = make_bench(16, 16, 0.0, 11);
  PhaseMask mask;
  Rng rng = make_rng(4);
  mask.phases = RealVector(16);
  RealVector amps(16);
  for (Index m = 0; m < 16; ++m) {
    mask.phases(m) = uniform01(rng) * 6.283185307179586;
    amps(m) = 0.3 + uniform01(rng);
  }
  const ComplexVector h =
      propagate_pol(bench, Polarization::horizontal, mask, amps);
  CHECK(std::abs(h.squaredNorm() - amps.squaredNorm()) < 1e-10);
}

TEST_CASE("phase conjugation focuses light on the chosen detector") {
  // Program a focus on detector 3 through the measured-matrix path; the
  // peak-to-mean intensity enhancement scales with the mode count.
  BenchConfig bench = make_bench(64, 23, 0.0, 12);
  bench.reference_field = ComplexVector::Constant(23, Complex(1.0, 0.0));
  const TwoPhotonTM tm = assemble_two_photon(
      measure_tm(bench, Polarization::horizontal, {}),
      measure_tm(bench, Polarization::vertical, {}));
  const SlmProgram program =
      synthesize_slm(tm, focusing_operator(23, 3), Encoding::phase_only);

  const ComplexVector field = propagate_pol(
      bench, Polarization::horizontal, program.mask_h, program.amp_h);
  const double mean = field.squaredNorm() / 23.0;
  CHECK(std::norm(field(3)) / mean > 64.0 / 4.0);
}

TEST_CASE("phase error perturbs but preserves power statistics") {
  BenchConfig bench = make_bench(16, 16, 0.0, 13);
  bench.slm_phase_error_sigma = 0.3;
  PropagateOptions opts;
  opts.noise_seed = 21;
  const ComplexVector noisy = propagate_pol(
      bench, Polarization::horizontal, zero_mask(16), RealVector::Ones(16),
      opts);
  const ComplexVector clean = propagate_pol(
      bench, Polarization::horizontal, zero_mask(16), RealVector::Ones(16));
  CHECK((noisy - clean).cwiseAbs().maxCoeff() > 1e-3);
  // Phase noise does not change the injected power on a unitary bench.
  CHECK(std::abs(noisy.squaredNorm() - 16.0) < 1e-10);
}

TEST_CASE("camera renders a spot at the detector position") {
  ComplexVector fields(1);
  fields << Complex(1.0, 0.0);
  std::vector<Eigen::Vector2d> positions = {{12.0, 9.0}};
  const Image img = render_camera(fields, positions, 1.5, 24, 18, 0.0);
  double best = -1.0;
  int bx = -1, by = -1;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (img.at(x, y) > best) {
        best = img.at(x, y);
        bx = x;
        by = y;
      }
  CHECK(bx == 12);
  CHECK(by == 9);
}

TEST_CASE("zero fields render the uniform background") {
  ComplexVector fields = ComplexVector::Zero(3);
  std::vector<Eigen::Vector2d> positions = {{3, 3}, {8, 3}, {5, 8}};
  const Image img = render_camera(fields, positions, 2.0, 12, 12, 0.25);
  for (double v : img.pixels) CHECK(v == 0.25);
}

TEST_CASE("spot masses scale with detector intensities") {
  ComplexVector fields(2);
  fields << Complex(2.0, 0.0), Complex(0.0, 1.0);  // intensity ratio 4:1
  std::vector<Eigen::Vector2d> positions = {{20.0, 32.0}, {44.0, 32.0}};
  const Image img = render_camera(fields, positions, 2.0, 64, 64, 0.0);

  double left = 0.0, right = 0.0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      (x < 32 ? left : right) += img.at(x, y);
  CHECK(left / right == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("render rejects positions outside the grid") {
  ComplexVector fields(1);
  fields << Complex(1.0, 0.0);
  std::vector<Eigen::Vector2d> positions = {{99.0, 5.0}};
  try {
    render_camera(fields, positions, 1.0, 16, 16, 0.0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_parameter);
  }
}

TEST_CASE("phase mask wrapping lands in the canonical interval") {
  PhaseMask mask;
  mask.phases = RealVector(3);
  mask.phases << -1.0, 7.5, 100.0;
  mask.wrap();
  for (Index m = 0; m < 3; ++m) {
    CHECK(mask.phases(m) >= 0.0);
    CHECK(mask.phases(m) < 6.283185307179587);
  }
}

TEST_SUITE_END();
