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

#include "fiberqc/spad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "fiberqc/error.hpp"
#include "fiberqc/rng.hpp"

namespace fiberqc {

namespace {

constexpr double kFwhmToSigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))
constexpr double kPsPerSecond = 1e12;

struct TagLess {
  bool operator()(const TimeTag& a, const TimeTag& b) const {
    if (a.time_ps != b.time_ps) return a.time_ps < b.time_ps;
    return a.pixel < b.pixel;
  }
};

struct TagGreater {
  bool operator()(const TimeTag& a, const TimeTag& b) const {
    if (a.time_ps != b.time_ps) return a.time_ps > b.time_ps;
    return a.pixel > b.pixel;
  }
};

std::int64_t to_ps(double seconds) {
  return static_cast<std::int64_t>(std::llround(seconds * kPsPerSecond));
}

/// Appends an exponential-gap Poisson event stream on one pixel.
void append_poisson_stream(std::vector<TimeTag>& events, int pixel,
                           double rate_cps, double duration_s, Rng& rng) {
  if (rate_cps <= 0.0) return;
  std::exponential_distribution<double> gap(rate_cps);
  double t = gap(rng);
  while (t < duration_s) {
    events.push_back(TimeTag{to_ps(t), static_cast<std::uint16_t>(pixel)});
    t += gap(rng);
  }
}

/// Applies dead time and cross-talk to time-sorted primary events. Cross-talk
/// children are merged in through a pending min-heap (a child never precedes
/// its parent), so the output stays time-sorted.
std::vector<TimeTag> detect(std::vector<TimeTag> primaries,
                            const DetectorArray& array, double duration_s,
                            Rng& rng) {
  std::sort(primaries.begin(), primaries.end(), TagLess{});

  const std::int64_t dead_ps = to_ps(array.dead_time_s);
  const std::int64_t duration_ps = to_ps(duration_s);
  const double jitter_sigma_ps =
      array.jitter_fwhm_s * kFwhmToSigma * kPsPerSecond;

  // Per-pixel cumulative cross-talk rows; one uniform draw per accepted
  // event picks at most one child (higher-order joint events are ~beta^2).
  std::vector<std::vector<double>> cum(static_cast<std::size_t>(array.n_pix));
  for (int i = 0; i < array.n_pix; ++i) {
    double acc = 0.0;
    cum[static_cast<std::size_t>(i)].resize(
        static_cast<std::size_t>(array.n_pix));
    for (int j = 0; j < array.n_pix; ++j) {
      acc += array.crosstalk_true(i, j);
      cum[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = acc;
    }
  }

  std::vector<std::int64_t> last_accept(static_cast<std::size_t>(array.n_pix),
                                        std::numeric_limits<std::int64_t>::min() / 2);
  std::priority_queue<TimeTag, std::vector<TimeTag>, TagGreater> pending;
  std::vector<TimeTag> out;
  out.reserve(primaries.size());

  std::normal_distribution<double> jitter(0.0, jitter_sigma_ps);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::size_t idx = 0;
  while (idx < primaries.size() || !pending.empty()) {
    TimeTag tag;
    if (!pending.empty() &&
        (idx >= primaries.size() || TagLess{}(pending.top(), primaries[idx]))) {
      tag = pending.top();
      pending.pop();
    } else {
      tag = primaries[idx++];
    }
    if (tag.time_ps > duration_ps) continue;

    const auto p = static_cast<std::size_t>(tag.pixel);
    if (tag.time_ps - last_accept[p] < dead_ps) continue;
    last_accept[p] = tag.time_ps;
    out.push_back(tag);

    const double u = uniform(rng);
    const auto& row = cum[p];
    if (u < row.back()) {
      const auto child =
          std::lower_bound(row.begin(), row.end(), u) - row.begin();
      if (!array.is_disabled(static_cast<int>(child))) {
        std::int64_t child_ps =
            tag.time_ps +
            (jitter_sigma_ps > 0.0
                 ? static_cast<std::int64_t>(std::llround(jitter(rng)))
                 : 0);
        // Cross-talk is causal: a child cannot precede its parent.
        child_ps = std::max(child_ps, tag.time_ps);
        pending.push(TimeTag{child_ps, static_cast<std::uint16_t>(child)});
      }
    }
  }
  return out;
}

}  // namespace

std::vector<Eigen::Vector2d> hex_layout(int n_pix, double pitch) {
  require_dimension(n_pix >= 1, "hex_layout: n_pix must be >= 1");
  require_parameter(pitch > 0.0, "hex_layout: pitch must be > 0");

  // Axial coordinates (q, r); site position is
  //   x = pitch (q + r/2),  y = pitch (sqrt(3)/2) r.
  static constexpr int kDirs[6][2] = {{1, 0},  {0, 1},  {-1, 1},
                                      {-1, 0}, {0, -1}, {1, -1}};
  std::vector<Eigen::Vector2d> positions;
  positions.reserve(static_cast<std::size_t>(n_pix));

  auto emit = [&](int q, int r) {
    const double x = pitch * (q + 0.5 * r);
    const double y = pitch * 0.86602540378443864676 * r;
    positions.emplace_back(x, y);
  };

  emit(0, 0);
  for (int ring = 1; static_cast<int>(positions.size()) < n_pix; ++ring) {
    // Walk the ring: start at ring * dirs[4], take `ring` steps in each of
    // the six directions.
    int q = ring * kDirs[4][0];
    int r = ring * kDirs[4][1];
    for (const auto& d : kDirs) {
      for (int s = 0; s < ring; ++s) {
        if (static_cast<int>(positions.size()) >= n_pix) break;
        emit(q, r);
        q += d[0];
        r += d[1];
      }
    }
  }
  positions.resize(static_cast<std::size_t>(n_pix));
  return positions;
}

RealMatrix inverse_square_crosstalk(
    const std::vector<Eigen::Vector2d>& positions, double pitch,
    double beta_nn) {
  require_parameter(pitch > 0.0, "pitch must be > 0");
  require_parameter(beta_nn >= 0.0 && beta_nn <= 0.05,
                    "nearest-neighbor cross-talk must lie in [0, 0.05]");
  const auto n = static_cast<Index>(positions.size());
  RealMatrix beta = RealMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = (positions[static_cast<std::size_t>(i)] -
                        positions[static_cast<std::size_t>(j)])
                           .norm();
      const double ratio = d / pitch;
      beta(i, j) = beta_nn / (ratio * ratio);
    }
  }
  return beta;
}

DetectorArray DetectorArray::with_defaults(int n_pix, double efficiency,
                                           double dark_rate_cps,
                                           double beta_nn) {
  DetectorArray array;
  array.n_pix = n_pix;
  array.pitch_um = 23.0;
  array.positions_um = hex_layout(n_pix, array.pitch_um);
  array.efficiency = RealVector::Constant(n_pix, efficiency);
  array.dark_rate_cps = RealVector::Constant(n_pix, dark_rate_cps);
  array.crosstalk_true =
      inverse_square_crosstalk(array.positions_um, array.pitch_um, beta_nn);
  if (n_pix == 23) array.disabled_pixels = {22};
  array.validate();
  return array;
}

bool DetectorArray::is_disabled(int pixel) const {
  return std::find(disabled_pixels.begin(), disabled_pixels.end(), pixel) !=
         disabled_pixels.end();
}

std::vector<int> DetectorArray::enabled() const {
  std::vector<int> out;
  for (int p = 0; p < n_pix; ++p)
    if (!is_disabled(p)) out.push_back(p);
  return out;
}

void DetectorArray::validate() const {
  require_dimension(n_pix >= 1, "array needs at least one pixel");
  require_dimension(static_cast<int>(positions_um.size()) == n_pix,
                    "one position per pixel required");
  require_dimension(efficiency.size() == n_pix &&
                        dark_rate_cps.size() == n_pix,
                    "per-pixel parameter vectors must have n_pix entries");
  for (Index p = 0; p < n_pix; ++p) {
    require_parameter(efficiency(p) >= 0.0 && efficiency(p) <= 1.0,
                      "efficiency must lie in [0, 1]");
    require_parameter(dark_rate_cps(p) >= 0.0 && dark_rate_cps(p) <= 100.0,
                      "dark rate must lie in [0, 100] counts/s");
  }
  require_parameter(dead_time_s >= 0.0 && jitter_fwhm_s >= 0.0,
                    "dead time and jitter must be >= 0");
  require_dimension(crosstalk_true.rows() == n_pix &&
                        crosstalk_true.cols() == n_pix,
                    "cross-talk matrix must be n_pix x n_pix");
  for (Index i = 0; i < n_pix; ++i) {
    require_parameter(crosstalk_true(i, i) == 0.0,
                      "cross-talk diagonal must be zero");
    for (Index j = 0; j < n_pix; ++j)
      require_parameter(
          crosstalk_true(i, j) >= 0.0 && crosstalk_true(i, j) <= 0.05,
          "cross-talk entries must lie in [0, 0.05]");
  }
  if (n_pix >= 2) {
    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions_um.size(); ++i)
      for (std::size_t j = i + 1; j < positions_um.size(); ++j)
        min_d = std::min(min_d, (positions_um[i] - positions_um[j]).norm());
    require_parameter(std::abs(min_d - pitch_um) <= 1e-9 * pitch_um,
                      "nearest-neighbor spacing must equal the pitch");
  }
  for (int p : disabled_pixels)
    require_parameter(p >= 0 && p < n_pix, "disabled pixel out of range");
}

void TimeTagStream::validate() const {
  std::int64_t last = std::numeric_limits<std::int64_t>::min();
  for (const auto& tag : events) {
    if (tag.time_ps < last)
      raise(ErrorCode::invalid_stream, "time tags must be nondecreasing");
    if (static_cast<int>(tag.pixel) >= n_pix)
      raise(ErrorCode::invalid_stream, "time tag pixel id out of range");
    last = tag.time_ps;
  }
}

TimeTagStream simulate_pairs(const OutcomeDistribution& dist,
                             const PhotonPairSource& source,
                             const DetectorArray& array, double duration_s,
                             std::uint64_t seed) {
  dist.validate();
  source.validate();
  array.validate();
  require_parameter(duration_s > 0.0, "duration must be > 0");
  require_dimension(dist.n_det <= array.n_pix,
                    "distribution indices must be pixel ids");

  // Cumulative outcome table: packed pairs followed by the loss bucket.
  std::vector<double> cum(static_cast<std::size_t>(dist.pair_probs.size()));
  double acc = 0.0;
  for (Index k = 0; k < dist.pair_probs.size(); ++k) {
    acc += dist.pair_probs(k);
    cum[static_cast<std::size_t>(k)] = acc;
  }
  // Pair index lookup for the packed triangle.
  std::vector<std::pair<int, int>> pair_of(cum.size());
  {
    std::size_t k = 0;
    for (Index i = 0; i < dist.n_det; ++i)
      for (Index j = i; j < dist.n_det; ++j) pair_of[k++] = {static_cast<int>(i),
                                                             static_cast<int>(j)};
  }

  const double jitter_sigma_s = array.jitter_fwhm_s * kFwhmToSigma;

  std::vector<TimeTag> primaries;
  const double expected =
      source.pair_rate_hz * duration_s * 2.0 + array.dark_rate_cps.sum() * duration_s;
  primaries.reserve(static_cast<std::size_t>(expected * 1.1) + 64);

  Rng pair_rng = make_rng(derive_seed(seed, 0));
  if (source.pair_rate_hz > 0.0) {
    std::exponential_distribution<double> gap(source.pair_rate_hz);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, jitter_sigma_s);
    double t = gap(pair_rng);
    while (t < duration_s) {
      const double u = uniform(pair_rng);
      const auto k = static_cast<std::size_t>(
          std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
      if (k < cum.size()) {  // otherwise the pair is lost
        const auto [i, j] = pair_of[k];
        for (int photon = 0; photon < 2; ++photon) {
          const int pixel = photon == 0 ? i : j;
          if (array.is_disabled(pixel)) continue;
          if (uniform(pair_rng) >= array.efficiency(pixel)) continue;
          double arrival = t + (photon == 1 ? source.delay_s : 0.0);
          if (jitter_sigma_s > 0.0) arrival += jitter(pair_rng);
          if (arrival < 0.0 || arrival > duration_s) continue;
          primaries.push_back(
              TimeTag{to_ps(arrival), static_cast<std::uint16_t>(pixel)});
        }
      }
      t += gap(pair_rng);
    }
  }

  Rng dark_rng = make_rng(derive_seed(seed, 1));
  for (int p = 0; p < array.n_pix; ++p) {
    if (array.is_disabled(p)) continue;
    append_poisson_stream(primaries, p, array.dark_rate_cps(p), duration_s,
                          dark_rng);
  }

  Rng detect_rng = make_rng(derive_seed(seed, 2));
  TimeTagStream stream;
  stream.n_pix = array.n_pix;
  stream.duration_s = duration_s;
  stream.events = detect(std::move(primaries), array, duration_s, detect_rng);
  return stream;
}

TimeTagStream simulate_classical(const RealVector& rates_cps,
                                 const DetectorArray& array, double duration_s,
                                 std::uint64_t seed) {
  array.validate();
  require_dimension(rates_cps.size() == array.n_pix,
                    "one rate per pixel required");
  require_parameter(duration_s > 0.0, "duration must be > 0");
  for (Index p = 0; p < rates_cps.size(); ++p)
    require_parameter(rates_cps(p) >= 0.0, "rates must be >= 0");

  std::vector<TimeTag> primaries;
  primaries.reserve(static_cast<std::size_t>(
                        (rates_cps.sum() + array.dark_rate_cps.sum()) *
                        duration_s * 1.1) +
                    64);

  Rng rng = make_rng(derive_seed(seed, 0));
  for (int p = 0; p < array.n_pix; ++p) {
    if (array.is_disabled(p)) continue;
    // Classical light and dark counts merge into one Poisson stream.
    append_poisson_stream(primaries, p,
                          rates_cps(p) + array.dark_rate_cps(p), duration_s,
                          rng);
  }

  Rng detect_rng = make_rng(derive_seed(seed, 1));
  TimeTagStream stream;
  stream.n_pix = array.n_pix;
  stream.duration_s = duration_s;
  stream.events = detect(std::move(primaries), array, duration_s, detect_rng);
  return stream;
}

}  // namespace fiberqc
