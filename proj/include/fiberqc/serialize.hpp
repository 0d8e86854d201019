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

#ifndef FIBERQC_SERIALIZE_HPP
#define FIBERQC_SERIALIZE_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fiberqc/calibration.hpp"
#include "fiberqc/metrics.hpp"
#include "fiberqc/quantum.hpp"

namespace fiberqc {

using Json = nlohmann::json;

/// Deterministic decimal rendering used by every CSV writer (%.12g), so
/// identical data produces byte-identical files.
std::string format_double(double value);

// --- JSON -----------------------------------------------------------------

Json to_json(const ComplexMatrix& m);  // row-major arrays of [re, im]
ComplexMatrix complex_matrix_from_json(const Json& j);

Json to_json(const MeasuredTM& tm);
MeasuredTM measured_tm_from_json(const Json& j);

Json to_json(const TargetOperator& op);
TargetOperator target_from_json(const Json& j);

Json to_json(const CrosstalkModel& model);
CrosstalkModel crosstalk_model_from_json(const Json& j);

/// Bench metadata only (seed, dimensions, noise); the matrices regenerate
/// deterministically from the seed.
Json bench_meta_json(const BenchConfig& bench);

void save_json(const std::string& path, const Json& j);
Json load_json(const std::string& path);

// --- CSV ------------------------------------------------------------------

void write_singles_csv(const std::string& path, const CoincidenceRecord& rec);
void write_coincidences_csv(const std::string& path,
                            const CoincidenceRecord& rec);
void write_distribution_csv(const std::string& path,
                            const OutcomeDistribution& dist);
void write_hom_scan_csv(const std::string& path, const HomScan& scan);
/// Measured per-delay coincidences for the pairs within `pixels`.
void write_hom_records_csv(const std::string& path,
                           const std::vector<double>& delays_s,
                           const std::vector<CoincidenceRecord>& records,
                           const std::vector<Index>& pixels);
void write_similarity_summary_csv(const std::string& path,
                                  const std::vector<SimilarityReport>& reports);
void write_similarity_trials_csv(const std::string& path,
                                 const std::vector<SimilarityReport>& reports);
void write_localization_csv(const std::string& path,
                            const DetectorLocalization& loc);

// --- Time tags ------------------------------------------------------------

void write_timetags_csv(const std::string& path, const TimeTagStream& stream);
/// Little-endian records: u8 pixel, u64 timestamp in ps.
void write_timetags_binary(const std::string& path,
                           const TimeTagStream& stream);

// --- Images ---------------------------------------------------------------

/// 16-bit PGM, linearly scaled to the image maximum.
void write_pgm16(const std::string& path, const Image& image);
void write_image_csv(const std::string& path, const Image& image);

}  // namespace fiberqc

#endif  // FIBERQC_SERIALIZE_HPP
