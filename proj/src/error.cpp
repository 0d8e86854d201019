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

#include "fiberqc/error.hpp"

namespace fiberqc {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok:
      return "ok";
    case ErrorCode::invalid_dimension:
      return "invalid_dimension";
    case ErrorCode::invalid_config:
      return "invalid_config";
    case ErrorCode::invalid_parameter:
      return "invalid_parameter";
    case ErrorCode::invalid_distribution:
      return "invalid_distribution";
    case ErrorCode::invalid_stream:
      return "invalid_stream";
    case ErrorCode::degenerate_target:
      return "degenerate_target";
    case ErrorCode::undefined_visibility:
      return "undefined_visibility";
    case ErrorCode::undefined_similarity:
      return "undefined_similarity";
    case ErrorCode::underdetermined_fit:
      return "underdetermined_fit";
    case ErrorCode::localization_failure:
      return "localization_failure";
    case ErrorCode::io_error:
      return "io_error";
  }
  return "unknown";
}

}  // namespace fiberqc
