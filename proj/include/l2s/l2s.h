/* SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the l2s sparse-array designer.
 *
 * Every function returns an l2s_status. On failure a description of the most
 * recent error on the calling thread is available from l2s_last_error().
 * Handles are opaque and must be released with the matching *_free call.
 */

#ifndef L2S_L2S_H
#define L2S_L2S_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(L2S_BUILDING_LIBRARY)
#    define L2S_API __declspec(dllexport)
#  else
#    define L2S_API __declspec(dllimport)
#  endif
#else
#  define L2S_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum l2s_status
{
    L2S_OK = 0,
    L2S_ERR_INVALID_ARGUMENT = 1,
    L2S_ERR_DOMAIN = 2,
    L2S_ERR_DIMENSION = 3,
    L2S_ERR_CONFIG = 4,
    L2S_ERR_SCHEMA = 5,
    L2S_ERR_IO = 6,
    L2S_ERR_DUPLICATE_SELECTION = 7,
    L2S_ERR_DIVERGED = 8,
    L2S_ERR_CAP_EXCEEDED = 9,
    L2S_ERR_EVALUATION = 10,
    L2S_ERR_GRADCHECK_FAILED = 11,
    L2S_ERR_INTERNAL = 99
} l2s_status;

typedef struct l2s_scenario l2s_scenario;
typedef struct l2s_result l2s_result;
typedef struct l2s_oracle l2s_oracle;

typedef struct l2s_scenario_info
{
    size_t n_elements;
    double spacing_wavelengths;
    size_t select_m;
    size_t grid_points;
    size_t n_epochs;
    size_t n_steps;
    size_t t_samples;
    uint64_t seed;
    int reoptimize_q_after_harden;
    uint64_t oracle_cap;
} l2s_scenario_info;

typedef struct l2s_epoch_record
{
    size_t epoch;
    double alpha;
    double fit;
    double penalty;
    double total;
    double elapsed_seconds;
} l2s_epoch_record;

typedef void (*l2s_progress_fn)(const l2s_epoch_record *record, void *user);

typedef struct l2s_gradcheck_options
{
    uint64_t seed;
    size_t instances;
    size_t coords_per_instance;
    size_t max_n;
    size_t max_m;
    size_t max_k;
    size_t max_t;
    int include_zero_q;
    double corrupt; /* test hook: scales the analytic gradient by (1 + corrupt) */
} l2s_gradcheck_options;

typedef struct l2s_gradcheck_report
{
    size_t instances;
    size_t coords;
    double worst_error;
    double tolerance;
    int passed;
} l2s_gradcheck_report;

L2S_API const char *l2s_version(void);
L2S_API const char *l2s_last_error(void);
L2S_API const char *l2s_status_string(l2s_status status);

/* Scenarios */
L2S_API l2s_status l2s_scenario_load(const char *path, l2s_scenario **out);
L2S_API l2s_status l2s_scenario_parse(const char *json_text, l2s_scenario **out);
L2S_API void l2s_scenario_free(l2s_scenario *scenario);
L2S_API l2s_status l2s_scenario_info_get(const l2s_scenario *scenario, l2s_scenario_info *out);
L2S_API l2s_status l2s_scenario_set_seed(l2s_scenario *scenario, uint64_t seed);
L2S_API l2s_status l2s_scenario_set_reoptimize_q(l2s_scenario *scenario, int enabled);
L2S_API l2s_status l2s_scenario_set_oracle_cap(l2s_scenario *scenario, uint64_t cap);
L2S_API l2s_status l2s_scenario_save(const l2s_scenario *scenario, const char *path);

/* Training */
L2S_API l2s_status l2s_train(const l2s_scenario *scenario, l2s_progress_fn progress, void *user, l2s_result **out);
L2S_API void l2s_result_free(l2s_result *result);
/* Copies up to `capacity` indices into `indices`; `count` receives M. */
L2S_API l2s_status l2s_result_selection(const l2s_result *result, size_t *indices, size_t capacity, size_t *count);
L2S_API l2s_status l2s_result_degraded(const l2s_result *result, int *degraded);
L2S_API l2s_status l2s_result_final_loss(const l2s_result *result, l2s_epoch_record *out);
L2S_API l2s_status l2s_result_achieved_fit(const l2s_result *result, double *fit);
/* selection.json, beampattern.csv, convergence.csv, hpbw.json */
L2S_API l2s_status l2s_result_write(const l2s_result *result, const l2s_scenario *scenario, const char *out_dir);
L2S_API l2s_status l2s_convergence_write(const l2s_epoch_record *records, size_t count, const char *path);

/* Exhaustive oracle */
L2S_API l2s_status l2s_oracle_run(const l2s_scenario *scenario, l2s_oracle **out);
L2S_API void l2s_oracle_free(l2s_oracle *oracle);
L2S_API l2s_status l2s_oracle_count(const l2s_oracle *oracle, uint64_t *count);
L2S_API l2s_status l2s_oracle_best(const l2s_oracle *oracle, size_t *indices, size_t capacity, size_t *count,
                                   double *fit_loss);
/* oracle_ranked.csv, oracle_best.json */
L2S_API l2s_status l2s_oracle_write(const l2s_oracle *oracle, const l2s_scenario *scenario, const char *out_dir);

/* Scoring a fixed selection */
L2S_API l2s_status l2s_selection_read(const char *path, const l2s_scenario *scenario, size_t *indices,
                                      size_t capacity, size_t *count);
/* Re-optimizes Q for the selection; writes eval.json, beampattern.csv, hpbw.json. */
L2S_API l2s_status l2s_eval(const l2s_scenario *scenario, const size_t *indices, size_t count, const char *out_dir,
                            double *fit_loss);

/* Gradient check */
L2S_API void l2s_gradcheck_defaults(l2s_gradcheck_options *options);
/* Returns L2S_ERR_GRADCHECK_FAILED (with the report filled in) when the worst error exceeds the tolerance. */
L2S_API l2s_status l2s_gradcheck(const l2s_gradcheck_options *options, l2s_gradcheck_report *report);

#ifdef __cplusplus
}
#endif

#endif
