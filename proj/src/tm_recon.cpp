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

#include "fiberqc/tm_recon.hpp"

#include <cmath>

#include "fiberqc/error.hpp"
#include "fiberqc/rng.hpp"

namespace fiberqc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Largest divisor of n not exceeding sqrt(n); used to factor the mode count
/// into a 2D macro-pixel grid (n = gx * gy with gy <= gx).
Index grid_rows(Index n) {
  Index best = 1;
  for (Index d = 1; d * d <= n; ++d)
    if (n % d == 0) best = d;
  return best;
}

double poissonize(double intensity, double scale, Rng& rng) {
  if (intensity <= 0.0) return 0.0;
  std::poisson_distribution<long long> p(scale * intensity);
  return static_cast<double>(p(rng)) / scale;
}

}  // namespace

std::vector<PhaseMask> phase_ramp_basis(Index n_modes) {
  require_dimension(n_modes >= 1, "phase_ramp_basis: n_modes must be >= 1");
  const Index gy = grid_rows(n_modes);
  const Index gx = n_modes / gy;

  std::vector<PhaseMask> masks;
  masks.reserve(static_cast<std::size_t>(n_modes));
  for (Index m = 0; m < n_modes; ++m) {
    const Index kx = m % gx;  // inclination along x
    const Index ky = m / gx;  // inclination along y (orientation)
    PhaseMask mask;
    mask.phases = RealVector(n_modes);
    for (Index p = 0; p < n_modes; ++p) {
      const Index px = p % gx;
      const Index py = p / gx;
      double phi = kTwoPi * (static_cast<double>(kx * px) / gx +
                             static_cast<double>(ky * py) / gy);
      mask.phases(p) = phi;
    }
    mask.wrap();
    masks.push_back(std::move(mask));
  }
  return masks;
}

MeasuredTM measure_tm(const BenchConfig& bench, Polarization pol,
                      const MeasureOptions& opts) {
  bench.validate();
  require_config(opts.phase_steps == 4,
                 "measure_tm implements the four-step scheme only");
  const bool noisy = opts.photon_scale != 0.0;
  if (noisy)
    require_config(opts.photon_scale > 0.0,
                   "photon_scale must be > 0 when noise is enabled");

  const ComplexMatrix& truth = bench.transmission(pol);
  const Index n_det = bench.n_det;
  const Index n_modes = bench.n_modes;

  // Four probe phases theta with closed-form inversion
  //   t = [(I(0) - I(pi)) + i(I(3pi/2) - I(pi/2))]/4.
  static constexpr double kSteps[4] = {0.0, 1.5707963267948966,
                                       3.141592653589793, 4.71238898038469};

  MeasuredTM out;
  out.t = ComplexMatrix::Zero(n_det, n_modes);

  for (Index m = 0; m < n_modes; ++m) {
    // Displaying the m-th phase ramp injects unit power into Fourier mode m;
    // the simulation injects the equivalent unit mode amplitude directly.
    RealMatrix intensity(n_det, 4);
    for (int s = 0; s < 4; ++s) {
      const Complex step(std::cos(kSteps[s]), std::sin(kSteps[s]));
      Rng rng = make_rng(derive_seed(opts.seed, static_cast<std::uint64_t>(
                                                    m * 4 + s)));
      for (Index i = 0; i < n_det; ++i) {
        const Complex field = bench.reference_field(i) + step * truth(i, m);
        double value = std::norm(field);
        if (noisy) value = poissonize(value, opts.photon_scale, rng);
        intensity(i, s) = value;
      }
    }
    for (Index i = 0; i < n_det; ++i) {
      out.t(i, m) = Complex(intensity(i, 0) - intensity(i, 2),
                            intensity(i, 3) - intensity(i, 1)) /
                    4.0;
    }
  }

  if (opts.normalize_reference) {
    // Reference-only acquisition (probe blocked): estimates |R_i|^2 so the
    // rows can be normalized to a pure per-detector phase ambiguity.
    Rng rng = make_rng(derive_seed(opts.seed, 0x5e1fULL + 4 * n_modes));
    for (Index i = 0; i < n_det; ++i) {
      double ref_intensity = std::norm(bench.reference_field(i));
      if (noisy) {
        // Average four frames, matching the per-mode frame budget.
        double acc = 0.0;
        for (int s = 0; s < 4; ++s)
          acc += poissonize(ref_intensity, opts.photon_scale, rng);
        ref_intensity = acc / 4.0;
      }
      const double amp = std::sqrt(std::max(ref_intensity, 1e-24));
      out.t.row(i) /= amp;
    }
    out.reference_normalized = true;
  }
  return out;
}

ComplexMatrix TwoPhotonTM::amplitude(const ComplexVector& in_h,
                                     const ComplexVector& in_v) const {
  require_dimension(in_h.size() == n_modes() && in_v.size() == n_modes(),
                    "input fields must have n_modes entries");
  ComplexVector out_h = h.t * in_h;
  ComplexVector out_v = v.t * in_v;
  return out_h * out_v.transpose();
}

TwoPhotonTM assemble_two_photon(MeasuredTM tm_h, MeasuredTM tm_v) {
  require_dimension(tm_h.n_det() == tm_v.n_det(),
                    "polarization TMs must share n_det");
  require_dimension(tm_h.n_modes() == tm_v.n_modes(),
                    "polarization TMs must share n_modes");
  return TwoPhotonTM{std::move(tm_h), std::move(tm_v)};
}

SlmProgram synthesize_slm(const TwoPhotonTM& tm, const TargetOperator& target,
                          Encoding encoding,
                          const std::vector<Index>& detectors) {
  target.validate();
  std::vector<Index> rows = detectors;
  if (rows.empty()) {
    rows.resize(static_cast<std::size_t>(target.n_det()));
    for (std::size_t i = 0; i < rows.size(); ++i)
      rows[i] = static_cast<Index>(i);
  }
  require_dimension(static_cast<Index>(rows.size()) == target.n_det(),
                    "detector selection must match target size");
  for (Index r : rows)
    require_dimension(r >= 0 && r < tm.n_det(),
                      "detector selection out of range");

  SlmProgram program;
  program.encoding = encoding;

  auto encode = [&](const MeasuredTM& t, const ComplexVector& column,
                    PhaseMask& mask, RealVector& amps) {
    // Phase conjugation: E_in = t_rows^dagger * column.
    ComplexVector field = ComplexVector::Zero(t.n_modes());
    for (std::size_t k = 0; k < rows.size(); ++k)
      field += std::conj(column(static_cast<Index>(k))) *
               t.t.row(rows[k]).transpose();
    ComplexVector e_in = field.conjugate();

    if (e_in.norm() == 0.0)
      raise(ErrorCode::degenerate_target,
            "synthesis target maps to a null SLM field");

    mask.phases = RealVector(e_in.size());
    amps = RealVector(e_in.size());
    for (Index mde = 0; mde < e_in.size(); ++mde) {
      const Complex z = e_in(mde);
      const double mag = std::abs(z);
      mask.phases(mde) = mag > 0.0 ? std::arg(z) : 0.0;
      amps(mde) = encoding == Encoding::phase_only ? 1.0 : mag;
    }
    mask.wrap();
  };

  encode(tm.h, target.column_h, program.mask_h, program.amp_h);
  encode(tm.v, target.column_v, program.mask_v, program.amp_v);
  return program;
}

TargetOperator realized_operator(const BenchConfig& bench,
                                 const SlmProgram& program,
                                 std::uint64_t noise_seed) {
  PropagateOptions opts;
  opts.noise_seed = noise_seed;
  auto [field_h, field_v] = propagate(bench, program.mask_h, program.mask_v,
                                      program.amp_h, program.amp_v, opts);

  // Each photon's input state is normalized to unit power, so column norms
  // report the realized transmission directly.
  const double norm_h = program.amp_h.norm();
  const double norm_v = program.amp_v.norm();
  require_parameter(norm_h > 0.0 && norm_v > 0.0,
                    "program amplitudes must carry power");

  TargetOperator realized;
  realized.column_h = field_h / norm_h;
  realized.column_v = field_v / norm_v;
  return realized;
}

TargetOperator restrict_rows(const TargetOperator& op,
                             const std::vector<Index>& detectors) {
  TargetOperator out;
  out.column_h = ComplexVector(static_cast<Index>(detectors.size()));
  out.column_v = ComplexVector(static_cast<Index>(detectors.size()));
  for (std::size_t k = 0; k < detectors.size(); ++k) {
    require_dimension(detectors[k] >= 0 && detectors[k] < op.n_det(),
                      "detector subset out of range");
    out.column_h(static_cast<Index>(k)) = op.column_h(detectors[k]);
    out.column_v(static_cast<Index>(k)) = op.column_v(detectors[k]);
  }
  return out;
}

}  // namespace fiberqc
