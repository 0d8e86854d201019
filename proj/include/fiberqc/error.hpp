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

#ifndef FIBERQC_ERROR_HPP
#define FIBERQC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace fiberqc {

/// Error categories surfaced through both the C++ and the C interfaces.
enum class ErrorCode : int {
  ok = 0,
  invalid_dimension = 1,    // non-positive or inconsistent sizes
  invalid_config = 2,       // malformed or incomplete configuration
  invalid_parameter = 3,    // out-of-range scalar parameter
  invalid_distribution = 4, // probabilities negative or not normalized
  invalid_stream = 5,       // time-tag stream not sorted / malformed
  degenerate_target = 6,    // synthesis target maps to a null field
  undefined_visibility = 7, // baseline coincidence rate is zero
  undefined_similarity = 8, // one of the distributions is all zero
  underdetermined_fit = 9,  // not enough data for a regression / fit
  localization_failure = 10,// detector-spot fit did not converge
  io_error = 11,            // file read/write failure
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

/// Throws invalid_dimension unless `condition` holds.
inline void require_dimension(bool condition, const std::string& message) {
  if (!condition) raise(ErrorCode::invalid_dimension, message);
}

inline void require_parameter(bool condition, const std::string& message) {
  if (!condition) raise(ErrorCode::invalid_parameter, message);
}

inline void require_config(bool condition, const std::string& message) {
  if (!condition) raise(ErrorCode::invalid_config, message);
}

}  // namespace fiberqc

#endif  // FIBERQC_ERROR_HPP
