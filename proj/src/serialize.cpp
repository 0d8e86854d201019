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

#include "fiberqc/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "fiberqc/error.hpp"

namespace fiberqc {

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) raise(ErrorCode::io_error, "cannot open for writing: " + path);
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

Json to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

ComplexMatrix complex_matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  require_dimension(rows >= 0 && cols >= 0, "negative matrix dimensions");
  const Json& data = j.at("data");
  require_dimension(static_cast<Index>(data.size()) == rows,
                    "matrix row count mismatch");
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = data.at(static_cast<std::size_t>(r));
    require_dimension(static_cast<Index>(row.size()) == cols,
                      "matrix column count mismatch");
    for (Index c = 0; c < cols; ++c) {
      const Json& z = row.at(static_cast<std::size_t>(c));
      m(r, c) = Complex(z.at(0).get<double>(), z.at(1).get<double>());
    }
  }
  return m;
}

Json to_json(const MeasuredTM& tm) {
  return Json{{"matrix", to_json(tm.t)},
              {"reference_normalized", tm.reference_normalized}};
}

MeasuredTM measured_tm_from_json(const Json& j) {
  MeasuredTM tm;
  tm.t = complex_matrix_from_json(j.at("matrix"));
  tm.reference_normalized = j.at("reference_normalized").get<bool>();
  return tm;
}

Json to_json(const TargetOperator& op) {
  auto column = [](const ComplexVector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i)
      out.push_back({v(i).real(), v(i).imag()});
    return out;
  };
  return Json{{"column_h", column(op.column_h)},
              {"column_v", column(op.column_v)}};
}

TargetOperator target_from_json(const Json& j) {
  auto column = [](const Json& arr) {
    ComplexVector v(static_cast<Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i)
      v(static_cast<Index>(i)) =
          Complex(arr.at(i).at(0).get<double>(), arr.at(i).at(1).get<double>());
    return v;
  };
  TargetOperator op;
  op.column_h = column(j.at("column_h"));
  op.column_v = column(j.at("column_v"));
  op.validate();
  return op;
}

Json to_json(const CrosstalkModel& model) {
  auto matrix = [](const RealMatrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
      Json row = Json::array();
      for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return Json{{"n_pix", model.alpha.rows()},
              {"alpha", matrix(model.alpha)},
              {"beta", matrix(model.beta)}};
}

CrosstalkModel crosstalk_model_from_json(const Json& j) {
  const auto n = j.at("n_pix").get<Index>();
  auto matrix = [n](const Json& rows) {
    RealMatrix m(n, n);
    require_dimension(static_cast<Index>(rows.size()) == n,
                      "model matrix row count mismatch");
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c)
        m(r, c) = rows.at(static_cast<std::size_t>(r))
                      .at(static_cast<std::size_t>(c))
                      .get<double>();
    return m;
  };
  CrosstalkModel model;
  model.alpha = matrix(j.at("alpha"));
  model.beta = matrix(j.at("beta"));
  model.validate();
  return model;
}

Json bench_meta_json(const BenchConfig& bench) {
  return Json{{"n_modes", bench.n_modes},
              {"n_det", bench.n_det},
              {"loss_fraction", bench.loss_fraction},
              {"slm_phase_error_sigma", bench.slm_phase_error_sigma},
              {"seed", bench.seed}};
}

void save_json(const std::string& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) raise(ErrorCode::io_error, "write failed: " + path);
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::io_error, "cannot open for reading: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    raise(ErrorCode::io_error, "malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_singles_csv(const std::string& path, const CoincidenceRecord& rec) {
  auto out = open_out(path);
  out << "pixel,rate_cps\n";
  for (Index p = 0; p < rec.n_pix(); ++p)
    out << p << ',' << format_double(rec.singles_rate(p)) << '\n';
}

void write_coincidences_csv(const std::string& path,
                            const CoincidenceRecord& rec) {
  auto out = open_out(path);
  out << "i,j,counts\n";
  for (Index i = 0; i < rec.n_pix(); ++i)
    for (Index j = i + 1; j < rec.n_pix(); ++j)
      out << i << ',' << j << ',' << format_double(rec.counts(i, j)) << '\n';
}

void write_distribution_csv(const std::string& path,
                            const OutcomeDistribution& dist) {
  auto out = open_out(path);
  out << "i,j,probability\n";
  for (Index i = 0; i < dist.n_det; ++i)
    for (Index j = i; j < dist.n_det; ++j)
      out << i << ',' << j << ',' << format_double(dist.prob(i, j)) << '\n';
  out << "loss,," << format_double(dist.loss_prob) << '\n';
}

void write_hom_scan_csv(const std::string& path, const HomScan& scan) {
  auto out = open_out(path);
  out << "delay_s,i,j,expected_counts\n";
  for (std::size_t d = 0; d < scan.delays_s.size(); ++d)
    for (const auto& curve : scan.curves)
      out << format_double(scan.delays_s[d]) << ',' << curve.i << ','
          << curve.j << ',' << format_double(curve.counts[d]) << '\n';
}

void write_hom_records_csv(const std::string& path,
                           const std::vector<double>& delays_s,
                           const std::vector<CoincidenceRecord>& records,
                           const std::vector<Index>& pixels) {
  require_dimension(delays_s.size() == records.size(),
                    "one record per delay required");
  auto out = open_out(path);
  out << "delay_s,i,j,counts\n";
  for (std::size_t d = 0; d < delays_s.size(); ++d)
    for (std::size_t a = 0; a < pixels.size(); ++a)
      for (std::size_t b = a + 1; b < pixels.size(); ++b)
        out << format_double(delays_s[d]) << ',' << pixels[a] << ','
            << pixels[b] << ','
            << format_double(records[d].counts(pixels[a], pixels[b])) << '\n';
}

void write_similarity_summary_csv(
    const std::string& path, const std::vector<SimilarityReport>& reports) {
  auto out = open_out(path);
  out << "n_det,photon_class,mean,stddev\n";
  for (const auto& rep : reports)
    out << rep.n_det << ',' << photon_class_name(rep.photon_class) << ','
        << format_double(rep.mean) << ',' << format_double(rep.stddev) << '\n';
}

void write_similarity_trials_csv(
    const std::string& path, const std::vector<SimilarityReport>& reports) {
  auto out = open_out(path);
  out << "n_det,photon_class,trial,similarity\n";
  for (const auto& rep : reports)
    for (std::size_t t = 0; t < rep.per_trial.size(); ++t)
      out << rep.n_det << ',' << photon_class_name(rep.photon_class) << ','
          << t << ',' << format_double(rep.per_trial[t]) << '\n';
}

void write_localization_csv(const std::string& path,
                            const DetectorLocalization& loc) {
  auto out = open_out(path);
  out << "detector,ok,x,y,sigma_x,sigma_y\n";
  for (std::size_t k = 0; k < loc.fits.size(); ++k) {
    out << k << ',' << (loc.ok[k] ? 1 : 0) << ',';
    if (loc.ok[k])
      out << format_double(loc.fits[k].x0) << ','
          << format_double(loc.fits[k].y0) << ','
          << format_double(loc.fits[k].sigma_x) << ','
          << format_double(loc.fits[k].sigma_y);
    else
      out << ",,,";
    out << '\n';
  }
}

void write_timetags_csv(const std::string& path, const TimeTagStream& stream) {
  auto out = open_out(path);
  out << "pixel,time_ps\n";
  for (const auto& tag : stream.events)
    out << static_cast<int>(tag.pixel) << ',' << tag.time_ps << '\n';
}

void write_timetags_binary(const std::string& path,
                           const TimeTagStream& stream) {
  auto out = open_out(path, /*binary=*/true);
  for (const auto& tag : stream.events) {
    const auto pixel = static_cast<std::uint8_t>(tag.pixel);
    const auto ps = static_cast<std::uint64_t>(tag.time_ps);
    std::uint8_t rec[9];
    rec[0] = pixel;
    for (int b = 0; b < 8; ++b)
      rec[1 + b] = static_cast<std::uint8_t>((ps >> (8 * b)) & 0xff);
    out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
  }
  if (!out) raise(ErrorCode::io_error, "write failed: " + path);
}

void write_pgm16(const std::string& path, const Image& image) {
  require_parameter(image.width > 0 && image.height > 0, "empty image");
  auto out = open_out(path, /*binary=*/true);
  const double peak = std::max(image.max_value(), 1e-300);
  out << "P5\n" << image.width << ' ' << image.height << "\n65535\n";
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const double v = std::clamp(image.at(x, y) / peak, 0.0, 1.0);
      const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
      const char bytes[2] = {static_cast<char>(q >> 8),
                             static_cast<char>(q & 0xff)};
      out.write(bytes, 2);  // PGM is big-endian
    }
  }
  if (!out) raise(ErrorCode::io_error, "write failed: " + path);
}

void write_image_csv(const std::string& path, const Image& image) {
  auto out = open_out(path);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (x) out << ',';
      out << format_double(image.at(x, y));
    }
    out << '\n';
  }
}

}  // namespace fiberqc
