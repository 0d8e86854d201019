/* Copyright 2026 The fiberqc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the fiberqc simulation library.
 *
 * All functions return fqc_status; FQC_OK is 0. On failure,
 * fqc_last_error() returns a thread-local human-readable message for the
 * most recent failing call. Handles are opaque and must be released with
 * the matching _destroy function. Complex buffers are interleaved
 * [re0, im0, re1, im1, ...].
 */

#ifndef FIBERQC_H
#define FIBERQC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fqc_status {
  FQC_OK = 0,
  FQC_ERR_INVALID_DIMENSION = 1,
  FQC_ERR_INVALID_CONFIG = 2,
  FQC_ERR_INVALID_PARAMETER = 3,
  FQC_ERR_INVALID_DISTRIBUTION = 4,
  FQC_ERR_INVALID_STREAM = 5,
  FQC_ERR_DEGENERATE_TARGET = 6,
  FQC_ERR_UNDEFINED_VISIBILITY = 7,
  FQC_ERR_UNDEFINED_SIMILARITY = 8,
  FQC_ERR_UNDERDETERMINED_FIT = 9,
  FQC_ERR_LOCALIZATION_FAILURE = 10,
  FQC_ERR_IO = 11,
  FQC_ERR_NULL_ARGUMENT = 90,
  FQC_ERR_INTERNAL = 100
} fqc_status;

/* Library version string, e.g. "0.1.0". */
const char* fqc_version(void);

/* Stable name for a status code. */
const char* fqc_status_name(fqc_status status);

/* Message for the most recent failure on this thread ("" if none). */
const char* fqc_last_error(void);

/* ------------------------------------------------------------------ */
/* Experiment configuration (INI text, keys addressed as section.key) */

typedef struct fqc_config fqc_config;

fqc_status fqc_config_create(fqc_config** out);
fqc_status fqc_config_load(const char* path, fqc_config** out);
fqc_status fqc_config_parse(const char* text, fqc_config** out);
/* Applies one "section.key=value" override. */
fqc_status fqc_config_set(fqc_config* config, const char* assignment);
/* FNV-1a hash of the canonical key=value serialization. */
fqc_status fqc_config_hash(const fqc_config* config, uint64_t* out);
void fqc_config_destroy(fqc_config* config);

/* ------------------------------------------------------------------ */
/* High-level commands (same behavior as the CLI)                     */

/* Reconstructs both polarization transmission matrices and writes them,
 * plus a reconstruction-quality report, into out_dir. */
fqc_status fqc_measure_tm(const fqc_config* config, const char* out_dir);

/* Runs one pipeline subcommand: "hom", "sylvester", "random-study",
 * "calibrate-crosstalk", or "localize". Artifacts land in out_dir. */
fqc_status fqc_run(const fqc_config* config, const char* subcommand,
                   const char* out_dir);

/* ------------------------------------------------------------------ */
/* Direct numeric entry points                                        */

/* Permanent of an n-by-n complex matrix (row-major interleaved). n <= 24. */
fqc_status fqc_permanent(int32_t n, const double* matrix_reim, double* out_re,
                         double* out_im);

/* Two-photon coincidence distribution of an operator given by its two
 * complex columns (length n_det each, interleaved) at mutual photon
 * indistinguishability gamma in [0, 1].
 *
 * pair_probs receives n_det*(n_det+1)/2 entries packed with
 *   index(i, j) = i*n_det - i*(i-1)/2 + (j-i)   for i <= j,
 * and *loss_prob the probability that the pair is not detected. */
fqc_status fqc_coincidence_distribution(int32_t n_det,
                                        const double* column_h_reim,
                                        const double* column_v_reim,
                                        double gamma, double* pair_probs,
                                        double* loss_prob);

/* Similarity of two coincidence-count matrices (n_pix x n_pix, row-major;
 * only off-diagonal entries contribute). Result is in [0, 1]. */
fqc_status fqc_similarity(int32_t n_pix, const double* counts_a,
                          const double* counts_b, double* out);

/* Two-photon interference visibility from far-delay and zero-delay
 * coincidence rates. */
fqc_status fqc_visibility(double c_far, double c_zero, double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FIBERQC_H */
