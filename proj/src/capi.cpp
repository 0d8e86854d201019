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

#include "fiberqc.h"

#include <exception>
#include <string>

#include "fiberqc/error.hpp"
#include "fiberqc/experiment.hpp"
#include "fiberqc/metrics.hpp"
#include "fiberqc/operators.hpp"
#include "fiberqc/quantum.hpp"

namespace {

thread_local std::string g_last_error;

fqc_status fail(fqc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

/// Runs `fn` and converts exceptions into status codes + the thread-local
/// error message.
template <typename Fn>
fqc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FQC_OK;
  } catch (const fiberqc::Error& e) {
    return fail(static_cast<fqc_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::exception& e) {
    return fail(FQC_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FQC_ERR_INTERNAL, "unknown error");
  }
}

bool null_arg(const void* p, fqc_status* status) {
  if (p != nullptr) return false;
  *status = fail(FQC_ERR_NULL_ARGUMENT, "null argument");
  return true;
}

fiberqc::ComplexVector unpack_column(std::int32_t n, const double* reim) {
  fiberqc::ComplexVector v(n);
  for (std::int32_t k = 0; k < n; ++k)
    v(k) = fiberqc::Complex(reim[2 * k], reim[2 * k + 1]);
  return v;
}

}  // namespace

struct fqc_config {
  fiberqc::ExperimentConfig config;
};

extern "C" {

const char* fqc_version(void) { return "0.1.0"; }

const char* fqc_status_name(fqc_status status) {
  if (status == FQC_ERR_NULL_ARGUMENT) return "null_argument";
  if (status == FQC_ERR_INTERNAL) return "internal_error";
  return fiberqc::error_code_name(
      static_cast<fiberqc::ErrorCode>(static_cast<int>(status)));
}

const char* fqc_last_error(void) { return g_last_error.c_str(); }

fqc_status fqc_config_create(fqc_config** out) {
  fqc_status status;
  if (null_arg(out, &status)) return status;
  return guarded([&] { *out = new fqc_config(); });
}

fqc_status fqc_config_load(const char* path, fqc_config** out) {
  fqc_status status;
  if (null_arg(path, &status) || null_arg(out, &status)) return status;
  return guarded([&] {
    auto* handle = new fqc_config();
    try {
      handle->config = fiberqc::ExperimentConfig::from_file(path);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

fqc_status fqc_config_parse(const char* text, fqc_config** out) {
  fqc_status status;
  if (null_arg(text, &status) || null_arg(out, &status)) return status;
  return guarded([&] {
    auto* handle = new fqc_config();
    try {
      handle->config = fiberqc::ExperimentConfig::from_text(text);
    } catch (...) {
      delete handle;
      throw;
    }
    *out = handle;
  });
}

fqc_status fqc_config_set(fqc_config* config, const char* assignment) {
  fqc_status status;
  if (null_arg(config, &status) || null_arg(assignment, &status))
    return status;
  return guarded([&] { config->config.set(assignment); });
}

fqc_status fqc_config_hash(const fqc_config* config, uint64_t* out) {
  fqc_status status;
  if (null_arg(config, &status) || null_arg(out, &status)) return status;
  return guarded(
      [&] { *out = fiberqc::fnv1a64(config->config.canonical()); });
}

void fqc_config_destroy(fqc_config* config) { delete config; }

fqc_status fqc_measure_tm(const fqc_config* config, const char* out_dir) {
  fqc_status status;
  if (null_arg(config, &status) || null_arg(out_dir, &status)) return status;
  return guarded([&] { fiberqc::cmd_measure_tm(config->config, out_dir); });
}

fqc_status fqc_run(const fqc_config* config, const char* subcommand,
                   const char* out_dir) {
  fqc_status status;
  if (null_arg(config, &status) || null_arg(subcommand, &status) ||
      null_arg(out_dir, &status))
    return status;
  return guarded(
      [&] { fiberqc::cmd_run(config->config, subcommand, out_dir); });
}

fqc_status fqc_permanent(int32_t n, const double* matrix_reim, double* out_re,
                         double* out_im) {
  fqc_status status;
  if (null_arg(matrix_reim, &status) || null_arg(out_re, &status) ||
      null_arg(out_im, &status))
    return status;
  return guarded([&] {
    fiberqc::ComplexMatrix m(n, n);
    for (std::int32_t r = 0; r < n; ++r)
      for (std::int32_t c = 0; c < n; ++c) {
        const double* e = matrix_reim + 2 * (r * n + c);
        m(r, c) = fiberqc::Complex(e[0], e[1]);
      }
    const fiberqc::Complex p = fiberqc::permanent(m);
    *out_re = p.real();
    *out_im = p.imag();
  });
}

fqc_status fqc_coincidence_distribution(int32_t n_det,
                                        const double* column_h_reim,
                                        const double* column_v_reim,
                                        double gamma, double* pair_probs,
                                        double* loss_prob) {
  fqc_status status;
  if (null_arg(column_h_reim, &status) || null_arg(column_v_reim, &status) ||
      null_arg(pair_probs, &status) || null_arg(loss_prob, &status))
    return status;
  return guarded([&] {
    fiberqc::TargetOperator op;
    op.column_h = unpack_column(n_det, column_h_reim);
    op.column_v = unpack_column(n_det, column_v_reim);
    const fiberqc::OutcomeDistribution dist =
        fiberqc::coincidence_distribution(op, gamma);
    for (fiberqc::Index k = 0; k < dist.pair_probs.size(); ++k)
      pair_probs[k] = dist.pair_probs(k);
    *loss_prob = dist.loss_prob;
  });
}

fqc_status fqc_similarity(int32_t n_pix, const double* counts_a,
                          const double* counts_b, double* out) {
  fqc_status status;
  if (null_arg(counts_a, &status) || null_arg(counts_b, &status) ||
      null_arg(out, &status))
    return status;
  return guarded([&] {
    fiberqc::RealMatrix a(n_pix, n_pix), b(n_pix, n_pix);
    for (std::int32_t r = 0; r < n_pix; ++r)
      for (std::int32_t c = 0; c < n_pix; ++c) {
        a(r, c) = counts_a[r * n_pix + c];
        b(r, c) = counts_b[r * n_pix + c];
      }
    std::vector<fiberqc::Index> pixels(static_cast<std::size_t>(n_pix));
    for (std::int32_t k = 0; k < n_pix; ++k) pixels[k] = k;
    *out = fiberqc::similarity(a, b, pixels);
  });
}

fqc_status fqc_visibility(double c_far, double c_zero, double* out) {
  fqc_status status;
  if (null_arg(out, &status)) return status;
  return guarded([&] { *out = fiberqc::visibility(c_far, c_zero); });
}

}  // extern "C"
