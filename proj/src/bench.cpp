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

#include "fiberqc/bench.hpp"

#include <cmath>

#include "fiberqc/error.hpp"
#include "fiberqc/operators.hpp"
#include "fiberqc/rng.hpp"

namespace fiberqc {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void PhaseMask::wrap() {
  for (Index i = 0; i < phases.size(); ++i) {
    double p = std::fmod(phases(i), kTwoPi);
    if (p < 0.0) p += kTwoPi;
    phases(i) = p;
  }
}

void BenchConfig::validate() const {
  require_dimension(n_modes >= 1 && n_det >= 1, "bench sizes must be >= 1");
  require_dimension(n_det <= n_modes, "bench requires n_det <= n_modes");
  require_parameter(loss_fraction >= 0.0 && loss_fraction < 1.0,
                    "loss_fraction must lie in [0, 1)");
  require_parameter(slm_phase_error_sigma >= 0.0,
                    "slm_phase_error_sigma must be >= 0");
  require_dimension(
      transmission_h.rows() == n_det && transmission_h.cols() == n_modes &&
          transmission_v.rows() == n_det && transmission_v.cols() == n_modes,
      "transmission matrices must be n_det x n_modes");
  require_dimension(reference_field.size() == n_det,
                    "reference field must have n_det entries");
  for (Index i = 0; i < n_det; ++i)
    require_parameter(std::abs(reference_field(i)) > 0.0,
                      "reference field entries must be nonzero");
}

BenchConfig make_bench(Index n_modes, Index n_det, double loss,
                       std::uint64_t seed) {
  require_dimension(n_modes >= 1 && n_det >= 1, "bench sizes must be >= 1");
  require_dimension(n_det <= n_modes, "make_bench requires n_det <= n_modes");
  require_parameter(loss >= 0.0 && loss < 1.0, "loss must lie in [0, 1)");

  BenchConfig bench;
  bench.n_modes = n_modes;
  bench.n_det = n_det;
  bench.loss_fraction = loss;
  bench.seed = seed;

  const double scale = std::sqrt(1.0 - loss);
  bench.transmission_h =
      scale * haar_unitary(n_modes, derive_seed(seed, 0)).topRows(n_det);
  bench.transmission_v =
      scale * haar_unitary(n_modes, derive_seed(seed, 1)).topRows(n_det);

  Rng rng = make_rng(derive_seed(seed, 2));
  bench.reference_field = ComplexVector(n_det);
  for (Index i = 0; i < n_det; ++i) {
    Complex r = gaussian_complex(rng);
    // A null reference would make a detector blind to the phase-stepping
    // probe; re-draw the (measure-zero) degenerate case.
    while (std::abs(r) < 1e-6) r = gaussian_complex(rng);
    bench.reference_field(i) = r;
  }
  return bench;
}

ComplexVector propagate_pol(const BenchConfig& bench, Polarization pol,
                            const PhaseMask& mask, const RealVector& amps,
                            const PropagateOptions& opts) {
  require_dimension(mask.n_modes() == bench.n_modes,
                    "mask length must equal n_modes");
  require_dimension(amps.size() == bench.n_modes,
                    "amplitude vector length must equal n_modes");
  for (Index m = 0; m < amps.size(); ++m)
    require_parameter(amps(m) >= 0.0, "amplitudes must be >= 0");

  ComplexVector input(bench.n_modes);
  const bool noisy = bench.slm_phase_error_sigma > 0.0;
  Rng rng = make_rng(opts.noise_seed);
  std::normal_distribution<double> err(0.0, bench.slm_phase_error_sigma);
  for (Index m = 0; m < bench.n_modes; ++m) {
    double phi = mask.phases(m) + opts.probe_phase;
    if (noisy) phi += err(rng);
    input(m) = amps(m) * Complex(std::cos(phi), std::sin(phi));
  }

  ComplexVector field = bench.transmission(pol) * input;
  if (opts.add_reference) field += bench.reference_field;
  return field;
}

std::pair<ComplexVector, ComplexVector> propagate(
    const BenchConfig& bench, const PhaseMask& mask_h, const PhaseMask& mask_v,
    const RealVector& amp_h, const RealVector& amp_v,
    const PropagateOptions& opts) {
  PropagateOptions oh = opts;
  PropagateOptions ov = opts;
  oh.noise_seed = derive_seed(opts.noise_seed, 0);
  ov.noise_seed = derive_seed(opts.noise_seed, 1);
  return {propagate_pol(bench, Polarization::horizontal, mask_h, amp_h, oh),
          propagate_pol(bench, Polarization::vertical, mask_v, amp_v, ov)};
}

Image render_camera(const ComplexVector& fields,
                    const std::vector<Eigen::Vector2d>& positions_px,
                    double psf_sigma_px, int width, int height,
                    double background) {
  require_dimension(static_cast<Index>(positions_px.size()) == fields.size(),
                    "one position per detector field required");
  require_parameter(psf_sigma_px > 0.0, "psf sigma must be > 0");
  require_parameter(width > 0 && height > 0, "image grid must be positive");

  Image img = Image::zeros(width, height);
  for (auto& p : img.pixels) p = background;

  const double inv_two_sigma2 = 1.0 / (2.0 * psf_sigma_px * psf_sigma_px);
  for (Index d = 0; d < fields.size(); ++d) {
    const double power = std::norm(fields(d));
    if (power == 0.0) continue;
    const double cx = positions_px[static_cast<std::size_t>(d)].x();
    const double cy = positions_px[static_cast<std::size_t>(d)].y();
    require_parameter(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height,
                      "detector position outside the camera grid");
    for (int y = 0; y < height; ++y) {
      const double dy = y - cy;
      for (int x = 0; x < width; ++x) {
        const double dx = x - cx;
        img.at(x, y) += power * std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
      }
    }
  }
  return img;
}

}  // namespace fiberqc
