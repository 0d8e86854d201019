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

#include "fiberqc/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fiberqc/error.hpp"

namespace fiberqc {

CrosstalkModel CrosstalkModel::zeros(Index n_pix) {
  CrosstalkModel m;
  m.alpha = RealMatrix::Zero(n_pix, n_pix);
  m.beta = RealMatrix::Zero(n_pix, n_pix);
  return m;
}

void CrosstalkModel::validate() const {
  require_dimension(alpha.rows() == alpha.cols() && beta.rows() == beta.cols() &&
                        alpha.rows() == beta.rows(),
                    "model matrices must be square and matched");
  for (Index i = 0; i < alpha.rows(); ++i) {
    require_parameter(beta(i, i) == 0.0, "beta diagonal must be zero");
    for (Index j = 0; j < alpha.cols(); ++j) {
      require_parameter(alpha(i, j) >= 0.0 && beta(i, j) >= 0.0,
                        "model coefficients must be >= 0");
      require_parameter(std::abs(alpha(i, j) - alpha(j, i)) <= 1e-9,
                        "alpha must be symmetric");
    }
  }
}

CrosstalkFit fit_crosstalk(const std::vector<CoincidenceRecord>& records,
                           double delta_t_s) {
  require_parameter(delta_t_s > 0.0, "coincidence window must be > 0");
  if (records.size() < 3)
    raise(ErrorCode::underdetermined_fit,
          "need at least 3 acquisitions to fit 3 coefficients per pair");
  const Index n_pix = records.front().n_pix();
  for (const auto& rec : records)
    require_dimension(rec.n_pix() == n_pix && rec.duration_s > 0.0,
                      "records must share the pixel count");

  const auto m = static_cast<Index>(records.size());
  CrosstalkFit fit;
  fit.model = CrosstalkModel::zeros(n_pix);
  fit.alpha_stderr = RealMatrix::Zero(n_pix, n_pix);
  fit.beta_stderr = RealMatrix::Zero(n_pix, n_pix);

  // Channels that never fired in any acquisition (e.g. a disabled pixel)
  // carry no information; their coefficients stay zero instead of tripping
  // the rank check below.
  std::vector<bool> silent(static_cast<std::size_t>(n_pix), true);
  for (const auto& rec : records)
    for (Index i = 0; i < n_pix; ++i)
      if (rec.singles_rate(i) > 0.0) silent[static_cast<std::size_t>(i)] = false;

  for (Index i = 0; i < n_pix; ++i) {
    for (Index j = i + 1; j < n_pix; ++j) {
      if (silent[static_cast<std::size_t>(i)] ||
          silent[static_cast<std::size_t>(j)])
        continue;
      RealMatrix design(m, 3);
      RealVector y(m);
      for (Index r = 0; r < m; ++r) {
        const auto& rec = records[static_cast<std::size_t>(r)];
        const double t = rec.duration_s;
        const double ni = rec.singles_rate(i);
        const double nj = rec.singles_rate(j);
        design(r, 0) = ni * nj * delta_t_s * t;
        design(r, 1) = ni * t;
        design(r, 2) = nj * t;
        y(r) = rec.counts(i, j);
      }

      Eigen::ColPivHouseholderQR<RealMatrix> qr(design);
      qr.setThreshold(1e-10);
      if (qr.rank() < 3)
        raise(ErrorCode::underdetermined_fit,
              "rank-deficient design for pixel pair (" + std::to_string(i) +
                  ", " + std::to_string(j) + ")");

      RealVector coef = qr.solve(y);
      const RealVector residual = y - design * coef;
      const double dof = static_cast<double>(m) - 3.0;
      // Count noise scales with the local mean (bright acquisitions are
      // noisier), so homoscedastic errors would be optimistic; use the
      // heteroscedasticity-consistent sandwich estimator instead.
      RealMatrix cov = RealMatrix::Zero(3, 3);
      if (dof > 0.0) {
        const RealMatrix bread = (design.transpose() * design).inverse();
        RealMatrix meat = RealMatrix::Zero(3, 3);
        for (Index r = 0; r < m; ++r)
          meat += residual(r) * residual(r) * design.row(r).transpose() *
                  design.row(r);
        cov = bread * meat * bread * (static_cast<double>(m) / dof);
      }

      double alpha = coef(0), beta_ij = coef(1), beta_ji = coef(2);
      for (double* c : {&alpha, &beta_ij, &beta_ji}) {
        if (*c < 0.0) {
          *c = 0.0;
          ++fit.clamped;
        }
      }
      fit.model.alpha(i, j) = fit.model.alpha(j, i) = alpha;
      fit.model.beta(i, j) = beta_ij;
      fit.model.beta(j, i) = beta_ji;
      fit.alpha_stderr(i, j) = fit.alpha_stderr(j, i) = std::sqrt(cov(0, 0));
      fit.beta_stderr(i, j) = std::sqrt(cov(1, 1));
      fit.beta_stderr(j, i) = std::sqrt(cov(2, 2));
    }
  }
  return fit;
}

CoincidenceRecord correct_coincidences(const CoincidenceRecord& rec,
                                       const CrosstalkModel& model) {
  require_dimension(model.alpha.rows() == rec.n_pix(),
                    "model and record dimensions must match");
  CoincidenceRecord out = rec;
  for (Index i = 0; i < rec.n_pix(); ++i) {
    for (Index j = 0; j < rec.n_pix(); ++j) {
      if (i == j) continue;
      const double ni = rec.singles_rate(i);
      const double nj = rec.singles_rate(j);
      const double background =
          model.alpha(i, j) * ni * nj * rec.delta_t_s * rec.duration_s +
          model.beta(i, j) * ni * rec.duration_s +
          model.beta(j, i) * nj * rec.duration_s;
      out.counts(i, j) = std::max(0.0, rec.counts(i, j) - background);
    }
  }
  return out;
}

namespace {

struct GaussParams {
  double a, x0, y0, sx, sy, b;
};

double gauss_model(const GaussParams& p, double x, double y) {
  const double dx = (x - p.x0) / p.sx;
  const double dy = (y - p.y0) / p.sy;
  return p.a * std::exp(-0.5 * (dx * dx + dy * dy)) + p.b;
}

double cost_of(const GaussParams& p, const Image& img) {
  double cost = 0.0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const double r = gauss_model(p, x, y) - img.at(x, y);
      cost += r * r;
    }
  return cost;
}

}  // namespace

Gaussian2DFit fit_gaussian2d(const Image& image) {
  require_parameter(image.width >= 3 && image.height >= 3,
                    "image too small for a 2D fit");
  const double lo = *std::min_element(image.pixels.begin(), image.pixels.end());
  const double hi = *std::max_element(image.pixels.begin(), image.pixels.end());
  if (!(hi > lo))
    raise(ErrorCode::localization_failure,
          "constant image carries no spot to fit");

  // Initialize from moments in a window around the brightest pixel, with a
  // median background estimate; global moments are hostage to wide-field
  // noise once the spot covers only a small fraction of the frame.
  std::vector<double> sorted = image.pixels;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double b0 = sorted[sorted.size() / 2];
  if (!(hi > b0))
    raise(ErrorCode::localization_failure,
          "image has no spot above the background level");

  int px = 0, py = 0;
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x)
      if (image.at(x, y) == hi) {
        px = x;
        py = y;
      }

  constexpr int kWindow = 6;
  double mass = 0.0, mx = 0.0, my = 0.0;
  for (int y = std::max(0, py - kWindow);
       y <= std::min(image.height - 1, py + kWindow); ++y)
    for (int x = std::max(0, px - kWindow);
         x <= std::min(image.width - 1, px + kWindow); ++x) {
      const double w = std::max(image.at(x, y) - b0, 0.0);
      mass += w;
      mx += w * x;
      my += w * y;
    }
  mx /= mass;
  my /= mass;
  double vx = 0.0, vy = 0.0;
  for (int y = std::max(0, py - kWindow);
       y <= std::min(image.height - 1, py + kWindow); ++y)
    for (int x = std::max(0, px - kWindow);
         x <= std::min(image.width - 1, px + kWindow); ++x) {
      const double w = std::max(image.at(x, y) - b0, 0.0);
      vx += w * (x - mx) * (x - mx);
      vy += w * (y - my) * (y - my);
    }
  vx = std::max(vx / mass, 0.25);
  vy = std::max(vy / mass, 0.25);

  GaussParams p{hi - b0, mx, my, std::sqrt(vx), std::sqrt(vy), b0};

  const int n_pixels = image.width * image.height;
  RealMatrix jac(n_pixels, 6);
  RealVector residual(n_pixels);

  double lambda = 1e-3;
  double cost = cost_of(p, image);
  int iterations = 0;

  for (int iter = 0; iter < 200; ++iter) {
    iterations = iter + 1;
    Index row = 0;
    for (int y = 0; y < image.height; ++y)
      for (int x = 0; x < image.width; ++x, ++row) {
        const double dx = (x - p.x0) / p.sx;
        const double dy = (y - p.y0) / p.sy;
        const double e = std::exp(-0.5 * (dx * dx + dy * dy));
        jac(row, 0) = e;
        jac(row, 1) = p.a * e * dx / p.sx;
        jac(row, 2) = p.a * e * dy / p.sy;
        jac(row, 3) = p.a * e * dx * dx / p.sx;
        jac(row, 4) = p.a * e * dy * dy / p.sy;
        jac(row, 5) = 1.0;
        residual(row) = p.a * e + p.b - image.at(x, y);
      }

    const RealMatrix jtj = jac.transpose() * jac;
    const RealVector jtr = jac.transpose() * residual;
    if (jtr.norm() < 1e-12 * (1.0 + std::abs(cost))) break;

    bool stepped = false;
    for (int attempt = 0; attempt < 25; ++attempt) {
      RealMatrix damped = jtj;
      for (int d = 0; d < 6; ++d)
        damped(d, d) += lambda * std::max(jtj(d, d), 1e-12);
      const RealVector delta = damped.ldlt().solve(-jtr);
      GaussParams trial{p.a + delta(0),  p.x0 + delta(1), p.y0 + delta(2),
                        p.sx + delta(3), p.sy + delta(4), p.b + delta(5)};
      trial.sx = std::abs(trial.sx);
      trial.sy = std::abs(trial.sy);
      if (trial.sx < 1e-3 || trial.sy < 1e-3 || !std::isfinite(trial.a)) {
        lambda *= 5.0;
        continue;
      }
      const double trial_cost = cost_of(trial, image);
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        const double improvement = cost - trial_cost;
        p = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (improvement < 1e-14 * (1.0 + cost)) iter = 200;  // converged
        break;
      }
      lambda *= 5.0;
    }
    if (!stepped) break;
  }

  if (!std::isfinite(p.x0) || !std::isfinite(p.y0) || p.a <= 0.0 ||
      p.x0 < -1.0 || p.x0 > image.width || p.y0 < -1.0 ||
      p.y0 > image.height)
    raise(ErrorCode::localization_failure, "2D Gaussian fit diverged");

  Gaussian2DFit fit;
  fit.x0 = p.x0;
  fit.y0 = p.y0;
  fit.sigma_x = p.sx;
  fit.sigma_y = p.sy;
  fit.amplitude = p.a;
  fit.offset = p.b;
  fit.iterations = iterations;
  return fit;
}

DetectorLocalization localize_detectors(const std::vector<Image>& focus_images,
                                        int expected_n) {
  require_dimension(static_cast<int>(focus_images.size()) == expected_n,
                    "one focus image per detector required");

  DetectorLocalization result;
  result.fits.resize(focus_images.size());
  result.ok.assign(focus_images.size(), false);

  for (std::size_t k = 0; k < focus_images.size(); ++k) {
    try {
      result.fits[k] = fit_gaussian2d(focus_images[k]);
      result.ok[k] = true;
    } catch (const Error&) {
      result.ok[k] = false;
    }
  }

  // Hex-grid consistency: the nearest-neighbor distances of a hexagonal
  // layout are all equal, so their coefficient of variation flags outliers.
  std::vector<Eigen::Vector2d> pts;
  for (std::size_t k = 0; k < focus_images.size(); ++k)
    if (result.ok[k])
      pts.emplace_back(result.fits[k].x0, result.fits[k].y0);

  if (pts.size() >= 2) {
    std::vector<double> nn(pts.size(),
                           std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = 0; b < pts.size(); ++b)
        if (a != b) nn[a] = std::min(nn[a], (pts[a] - pts[b]).norm());
    double mean = 0.0;
    for (double d : nn) mean += d;
    mean /= static_cast<double>(nn.size());
    double var = 0.0;
    for (double d : nn) var += (d - mean) * (d - mean);
    var /= static_cast<double>(nn.size());
    result.spacing_cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
    result.grid_consistent = result.spacing_cv < 0.10;
  }
  return result;
}

}  // namespace fiberqc
