/*
 Copyright 2026 The dualmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

/* C interface to the dualmpc simulation library.
 *
 * Objects are opaque handles created by the library and released with the
 * matching *_free function. Every fallible call returns a dmpc_status; on
 * failure dmpc_last_error() describes the problem for the calling thread.
 * Strings are copied into caller buffers: *needed receives the full length
 * including the terminator, and the buffer is filled only when it is large
 * enough. A null buffer with capacity 0 queries the size and returns OK; a
 * short buffer returns DMPC_ERR_INVALID_ARGUMENT. */

#ifndef DUALMPC_DUALMPC_H
#define DUALMPC_DUALMPC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DUALMPC_BUILDING)
#    define DMPC_API __declspec(dllexport)
#  else
#    define DMPC_API __declspec(dllimport)
#  endif
#else
#  define DMPC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dmpc_status
{
  DMPC_OK = 0,
  DMPC_ERR_NOT_POSITIVE_DEFINITE = 1,
  DMPC_ERR_ASYMMETRIC = 2,
  DMPC_ERR_RANK_DEFICIENT = 3,
  DMPC_ERR_DIMENSION_MISMATCH = 4,
  DMPC_ERR_OUT_OF_DOMAIN = 5,
  DMPC_ERR_NON_FINITE = 6,
  DMPC_ERR_EMPTY_INPUT = 7,
  DMPC_ERR_PARSE = 8,
  DMPC_ERR_VALIDATION = 9,
  DMPC_ERR_IO = 10,
  DMPC_ERR_INVALID_ARGUMENT = 11, /* null handle, bad index, short buffer */
  DMPC_ERR_INTERNAL = 12
} dmpc_status;

typedef enum dmpc_kind
{
  DMPC_KIND_NOMINAL = 0,
  DMPC_KIND_ROBUST = 1,
  DMPC_KIND_IMPLICIT_DUAL = 2,
  DMPC_KIND_EXPLICIT_DUAL = 3
} dmpc_kind;

typedef enum dmpc_mode
{
  DMPC_MODE_SINGLE = 0,
  DMPC_MODE_CAMPAIGN = 1,
  DMPC_MODE_ALPHA_SWEEP = 2
} dmpc_mode;

/* Per-cast vectors readable with dmpc_trace_cast_vector. */
typedef enum dmpc_field
{
  DMPC_FIELD_X_TRUE = 0,
  DMPC_FIELD_X_HAT = 1,
  DMPC_FIELD_P_DIAG = 2,
  DMPC_FIELD_U = 3
} dmpc_field;

typedef struct dmpc_config dmpc_config;
typedef struct dmpc_trace dmpc_trace;
typedef struct dmpc_summary dmpc_summary;

typedef struct dmpc_trace_info
{
  size_t n_casts; /* recorded casts (fewer than T if the run failed) */
  size_t n_x;
  dmpc_kind kind;
  double alpha;
  double total_cost;
  size_t violations;         /* measured y_t > y_max */
  size_t content_violations; /* noiseless u_t^T x_t > y_max */
  int failed;
  size_t failure_cast;
} dmpc_trace_info;

typedef struct dmpc_cast_info
{
  size_t t;
  double y;
  double y_max;
  double stage_cost;
  double backoff;
  int solver_status; /* 0 optimal, 1 max iterations, 2 infeasible, 3 numerical failure */
  size_t iterations;
} dmpc_cast_info;

typedef struct dmpc_variant_info
{
  char key[64];
  dmpc_kind kind;
  double alpha;
  size_t n_runs;
  size_t n_failed;
  double mean_cost; /* NaN when every run failed */
  double q50;
  double q90;
  double q99;
  double violation_share;
  double content_violation_share;
} dmpc_variant_info;

DMPC_API const char *dmpc_version(void);
DMPC_API const char *dmpc_status_name(dmpc_status status);
/* Message of the last failed call on this thread; "" if none. */
DMPC_API const char *dmpc_last_error(void);

DMPC_API dmpc_status dmpc_kind_from_string(const char *name, dmpc_kind *out);

/* Configuration. */
DMPC_API dmpc_status dmpc_config_default(dmpc_config **out);
DMPC_API dmpc_status dmpc_config_load(const char *path, dmpc_config **out);
DMPC_API dmpc_status dmpc_config_parse(const char *text, dmpc_config **out);
/* One assignment in the file grammar, e.g. ("x0", "[0.07, 0.13, 0.17]"). The
 * config is unchanged if the result would be invalid. */
DMPC_API dmpc_status dmpc_config_set(dmpc_config *config, const char *key, const char *value);
/* Value of a key exactly as write would print it. */
DMPC_API dmpc_status dmpc_config_get(const dmpc_config *config, const char *key, char *buffer, size_t capacity,
                                     size_t *needed);
DMPC_API dmpc_status dmpc_config_mode(const dmpc_config *config, dmpc_mode *out);
DMPC_API dmpc_status dmpc_config_to_string(const dmpc_config *config, char *buffer, size_t capacity,
                                           size_t *needed);
DMPC_API dmpc_status dmpc_config_write(const dmpc_config *config, const char *path);
DMPC_API void dmpc_config_free(dmpc_config *config);

/* Single closed-loop run of the configured kind from the configured (or the
 * example) initial estimate, with disturbances from the configured seed. */
DMPC_API dmpc_status dmpc_run_single(const dmpc_config *config, dmpc_trace **out);
DMPC_API dmpc_status dmpc_trace_info_get(const dmpc_trace *trace, dmpc_trace_info *out);
DMPC_API dmpc_status dmpc_trace_cast(const dmpc_trace *trace, size_t t, dmpc_cast_info *out);
/* Copies n_x values of one per-cast vector. */
DMPC_API dmpc_status dmpc_trace_cast_vector(const dmpc_trace *trace, size_t t, dmpc_field field, double *out,
                                            size_t capacity);
DMPC_API dmpc_status dmpc_trace_write_csv(const dmpc_trace *trace, const char *path);
/* Writes <prefix>states.csv, <prefix>controls.csv and <prefix>output.csv. */
DMPC_API dmpc_status dmpc_trace_write_figures(const dmpc_trace *trace, const char *prefix);
DMPC_API void dmpc_trace_free(dmpc_trace *trace);

/* Monte Carlo campaign for the configured mode (alpha-sweep runs only the
 * explicit dual kind over the configured or default weights). */
DMPC_API dmpc_status dmpc_run_campaign(const dmpc_config *config, dmpc_summary **out);
DMPC_API dmpc_status dmpc_summary_num_variants(const dmpc_summary *summary, size_t *out);
DMPC_API dmpc_status dmpc_summary_variant(const dmpc_summary *summary, size_t index, dmpc_variant_info *out);
/* Successful-run costs of one variant in run order. */
DMPC_API dmpc_status dmpc_summary_costs(const dmpc_summary *summary, size_t index, double *out, size_t capacity,
                                        size_t *count);
DMPC_API dmpc_status dmpc_summary_write_json(const dmpc_summary *summary, const char *path);
DMPC_API dmpc_status dmpc_summary_write_alpha_sweep(const dmpc_summary *summary, const char *path);
DMPC_API dmpc_status dmpc_summary_write_runs_csv(const dmpc_summary *summary, const char *path);
/* Writes <prefix>density_<key>.csv and <prefix>scatter_<key>.csv per variant,
 * with '/' in the key replaced by '_'. */
DMPC_API dmpc_status dmpc_summary_write_densities(const dmpc_summary *summary, const char *prefix);
DMPC_API void dmpc_summary_free(dmpc_summary *summary);

#ifdef __cplusplus
}
#endif

#endif /* DUALMPC_DUALMPC_H */
