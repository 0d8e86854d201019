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
#include <vector>

#include "fiberqc/calibration.hpp"
#include "fiberqc/error.hpp"
#include "fiberqc/spad.hpp"
#include "fiberqc/tagproc.hpp"

using namespace fiberqc;

namespace {

constexpr double kWindow = 1e-9;

/// Noiseless coincidence record generated straight from the background model.
CoincidenceRecord record_from_model(const CrosstalkModel& model,
                                    const RealVector& singles,
                                    double duration_s) {
  CoincidenceRecord rec;
  rec.singles_rate = singles;
  rec.delta_t_s = kWindow;
  rec.duration_s = duration_s;
  const Index n = singles.size();
  rec.counts = RealMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      rec.counts(i, j) =
          model.alpha(i, j) * singles(i) * singles(j) * kWindow * duration_s +
          model.beta(i, j) * singles(i) * duration_s +
          model.beta(j, i) * singles(j) * duration_s;
    }
  return rec;
}

CrosstalkModel example_model() {
  CrosstalkModel model = CrosstalkModel::zeros(3);
  model.alpha(0, 1) = model.alpha(1, 0) = 1.0;
  model.alpha(0, 2) = model.alpha(2, 0) = 0.8;
  model.alpha(1, 2) = model.alpha(2, 1) = 1.3;
  model.beta(0, 1) = 1e-3;
  model.beta(1, 0) = 2e-3;
  model.beta(0, 2) = 5e-4;
  model.beta(2, 0) = 0.0;
  model.beta(1, 2) = 3e-3;
  model.beta(2, 1) = 1.5e-3;
  model.validate();
  return model;
}

std::vector<CoincidenceRecord> example_records(const CrosstalkModel& model) {
  std::vector<CoincidenceRecord> records;
  const double levels[5][3] = {{1000, 500, 800},
                               {2000, 1500, 400},
                               {3000, 300, 1600},
                               {500, 2500, 2400},
                               {4000, 1000, 100}};
  for (const auto& level : levels) {
    RealVector singles(3);
    singles << level[0], level[1], level[2];
    records.push_back(record_from_model(model, singles, 2.0));
  }
  return records;
}

/// Noiseless Gaussian spot image.
Image gaussian_image(int width, int height, double a, double x0, double y0,
                     double sigma, double offset) {
  Image img = Image::zeros(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double dx = (x - x0) / sigma;
      const double dy = (y - y0) / sigma;
      img.at(x, y) = a * std::exp(-0.5 * (dx * dx + dy * dy)) + offset;
    }
  return img;
}

}  // namespace

TEST_SUITE_BEGIN("calibration");

TEST_CASE("model validation enforces symmetry and signs") {
  CrosstalkModel model = CrosstalkModel::zeros(3);
  model.validate();

  SUBCASE("asymmetric alpha") {
    model.alpha(0, 1) = 1.0;
    try {
      model.validate();
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_parameter);
    }
  }
  SUBCASE("negative beta") {
    model.beta(0, 1) = -1e-4;
    try {
      model.validate();
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_parameter);
    }
  }
  SUBCASE("nonzero beta diagonal") {
    model.beta(1, 1) = 1e-4;
    try {
      model.validate();
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_parameter);
    }
  }
}

TEST_CASE("fit recovers an exact background model to machine precision") {
  const CrosstalkModel truth = example_model();
  const CrosstalkFit fit = fit_crosstalk(example_records(truth), kWindow);
  CHECK((fit.model.alpha - truth.alpha).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((fit.model.beta - truth.beta).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(fit.clamped == 0);
  fit.model.validate();
}

TEST_CASE("fewer than three acquisitions cannot constrain the fit") {
  const CrosstalkModel truth = example_model();
  auto records = example_records(truth);
  records.resize(2);
  try {
    fit_crosstalk(records, kWindow);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::underdetermined_fit);
  }
}

TEST_CASE("identical intensity levels leave the design rank-deficient") {
  const CrosstalkModel truth = example_model();
  RealVector singles(3);
  singles << 1000, 500, 800;
  std::vector<CoincidenceRecord> records(
      4, record_from_model(truth, singles, 2.0));
  try {
    fit_crosstalk(records, kWindow);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::underdetermined_fit);
  }
}

TEST_CASE("channels that never fire are skipped, not fatal") {
  const CrosstalkModel truth = example_model();
  auto records = example_records(truth);
  for (auto& rec : records) {
    rec.singles_rate(2) = 0.0;
    for (Index k = 0; k < 3; ++k) {
      rec.counts(2, k) = 0.0;
      rec.counts(k, 2) = 0.0;
    }
  }
  const CrosstalkFit fit = fit_crosstalk(records, kWindow);
  // The live pair is still recovered; everything touching pixel 2 is zero.
  CHECK(fit.model.alpha(0, 1) == doctest::Approx(truth.alpha(0, 1)));
  CHECK(fit.model.beta(0, 1) == doctest::Approx(truth.beta(0, 1)));
  CHECK(fit.model.alpha(0, 2) == 0.0);
  CHECK(fit.model.alpha(1, 2) == 0.0);
  CHECK(fit.model.beta(2, 0) == 0.0);
  CHECK(fit.model.beta(0, 2) == 0.0);
}

TEST_CASE("negative estimates are clamped to zero and counted") {
  // Counts built from a (nonphysical) negative beta_01: least squares finds
  // it exactly, then the fit clamps it away.
  std::vector<CoincidenceRecord> records;
  for (double scale : {1.0, 2.0, 3.0, 4.0}) {
    RealVector singles(2);
    singles << 1000.0 * scale, 700.0 + 400.0 * scale * scale;
    CoincidenceRecord rec;
    rec.singles_rate = singles;
    rec.delta_t_s = kWindow;
    rec.duration_s = 2.0;
    rec.counts = RealMatrix::Zero(2, 2);
    rec.counts(0, 1) = rec.counts(1, 0) =
        0.5 * singles(0) * singles(1) * kWindow * 2.0 -
        1e-6 * singles(0) * 2.0 + 1e-5 * singles(1) * 2.0;
    records.push_back(rec);
  }
  const CrosstalkFit fit = fit_crosstalk(records, kWindow);
  CHECK(fit.model.alpha(0, 1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(fit.model.beta(0, 1) == 0.0);
  CHECK(fit.model.beta(1, 0) == doctest::Approx(1e-5).epsilon(1e-6));
  CHECK(fit.clamped == 1);
}

TEST_CASE("null cross-talk stays within its standard error on real streams") {
  DetectorArray array = DetectorArray::with_defaults(2, 1.0, 0.0, 0.0);
  array.jitter_fwhm_s = 0.0;
  array.disabled_pixels.clear();

  std::vector<CoincidenceRecord> records;
  int k = 0;
  for (double scale : {0.4, 0.7, 1.0, 1.3, 1.6, 2.0}) {
    RealVector rates(2);
    rates << 2e5 * scale, 1.4e5 * scale;
    const TimeTagStream stream =
        simulate_classical(rates, array, 5.0, 1000 + 17 * k++);
    records.push_back(count_coincidences(stream, kWindow));
  }
  const CrosstalkFit fit = fit_crosstalk(records, kWindow);
  // No cross-talk was simulated: beta must be indistinguishable from zero.
  CHECK(fit.model.beta(0, 1) <= 4.0 * fit.beta_stderr(0, 1));
  CHECK(fit.model.beta(1, 0) <= 4.0 * fit.beta_stderr(1, 0));
  // Accidentals dominate at these rates, pinning alpha near one.
  CHECK(fit.model.alpha(0, 1) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("correcting with the generating model removes every pair count") {
  const CrosstalkModel truth = example_model();
  const auto records = example_records(truth);
  for (const auto& rec : records) {
    const CoincidenceRecord corrected = correct_coincidences(rec, truth);
    CHECK(corrected.counts.cwiseAbs().maxCoeff() < 1e-9);
    CHECK((corrected.singles_rate - rec.singles_rate).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK(corrected.duration_s == rec.duration_s);
  }
}

TEST_CASE("the zero model is the identity correction") {
  const auto records = example_records(example_model());
  const CrosstalkModel zero = CrosstalkModel::zeros(3);
  const CoincidenceRecord corrected = correct_coincidences(records[0], zero);
  CHECK((corrected.counts - records[0].counts).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("correction clamps at zero instead of going negative") {
  const CrosstalkModel truth = example_model();
  auto rec = example_records(truth)[0];
  rec.counts *= 0.5;  // background model now exceeds every count
  const CoincidenceRecord corrected = correct_coincidences(rec, truth);
  CHECK(corrected.counts.minCoeff() == 0.0);
  CHECK(corrected.counts.maxCoeff() == 0.0);
}

TEST_CASE("correction requires matching dimensions") {
  const auto records = example_records(example_model());
  try {
    correct_coincidences(records[0], CrosstalkModel::zeros(2));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_dimension);
  }
}

TEST_CASE("2D Gaussian fit is exact on a noiseless spot") {
  const Image img = gaussian_image(32, 40, 500.0, 10.5, 20.25, 2.0, 3.0);
  const Gaussian2DFit fit = fit_gaussian2d(img);
  CHECK(fit.x0 == doctest::Approx(10.5).epsilon(1e-6));
  CHECK(fit.y0 == doctest::Approx(20.25).epsilon(1e-6));
  CHECK(fit.sigma_x == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(fit.sigma_y == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(fit.amplitude == doctest::Approx(500.0).epsilon(1e-4));
  CHECK(fit.offset == doctest::Approx(3.0).epsilon(1e-2));
}

TEST_CASE("2D Gaussian fit stays sub-pixel-accurate at SNR 20") {
  const Image clean = gaussian_image(48, 48, 1000.0, 22.3, 25.8, 2.0, 10.0);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    const Image noisy = with_noise(clean, 1000.0 / 20.0, seed);
    const Gaussian2DFit fit = fit_gaussian2d(noisy);
    CHECK(std::abs(fit.x0 - 22.3) < 0.2);
    CHECK(std::abs(fit.y0 - 25.8) < 0.2);
  }
}

TEST_CASE("constant and tiny images are rejected") {
  Image flat = Image::zeros(16, 16);
  for (double& v : flat.pixels) v = 7.0;
  try {
    fit_gaussian2d(flat);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::localization_failure);
  }
  try {
    fit_gaussian2d(Image::zeros(2, 8));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_parameter);
  }
}

TEST_CASE("detector localization reproduces a noiseless hex layout") {
  const auto truth = hex_layout(7, 12.0);
  std::vector<Image> images;
  for (const auto& p : truth)
    images.push_back(
        gaussian_image(48, 48, 800.0, 24.0 + p.x(), 24.0 + p.y(), 2.0, 5.0));
  const DetectorLocalization loc = localize_detectors(images, 7);
  REQUIRE(loc.fits.size() == 7);
  for (std::size_t k = 0; k < 7; ++k) {
    REQUIRE(loc.ok[k]);
    CHECK(std::abs(loc.fits[k].x0 - (24.0 + truth[k].x())) < 1e-5);
    CHECK(std::abs(loc.fits[k].y0 - (24.0 + truth[k].y())) < 1e-5);
  }
  CHECK(loc.spacing_cv < 1e-6);
  CHECK(loc.grid_consistent);
}

TEST_CASE("localization flags failed spots without aborting the rest") {
  const auto truth = hex_layout(7, 12.0);
  std::vector<Image> images;
  for (const auto& p : truth)
    images.push_back(
        gaussian_image(48, 48, 800.0, 24.0 + p.x(), 24.0 + p.y(), 2.0, 5.0));
  images[3] = Image::zeros(48, 48);  // dead channel, constant frame
  const DetectorLocalization loc = localize_detectors(images, 7);
  CHECK(!loc.ok[3]);
  for (std::size_t k = 0; k < 7; ++k)
    if (k != 3) CHECK(loc.ok[k]);
  CHECK(loc.grid_consistent);
}

TEST_CASE("localization at SNR 20 keeps the grid consistent") {
  const auto truth = hex_layout(7, 12.0);
  std::vector<Image> images;
  std::uint64_t seed = 100;
  for (const auto& p : truth) {
    const Image clean =
        gaussian_image(48, 48, 1000.0, 24.0 + p.x(), 24.0 + p.y(), 2.0, 10.0);
    images.push_back(with_noise(clean, 50.0, seed++));
  }
  const DetectorLocalization loc = localize_detectors(images, 7);
  for (std::size_t k = 0; k < 7; ++k) {
    REQUIRE(loc.ok[k]);
    CHECK(std::abs(loc.fits[k].x0 - (24.0 + truth[k].x())) < 0.2);
    CHECK(std::abs(loc.fits[k].y0 - (24.0 + truth[k].y())) < 0.2);
  }
  CHECK(loc.spacing_cv < 0.10);
  CHECK(loc.grid_consistent);
}

TEST_CASE("localization insists on one image per detector") {
  std::vector<Image> images(3, gaussian_image(16, 16, 10, 8, 8, 2, 0));
  try {
    localize_detectors(images, 4);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_dimension);
  }
}

TEST_SUITE_END();
