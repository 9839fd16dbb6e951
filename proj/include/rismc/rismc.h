/* Copyright The rismc Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the rismc multi-RIS multicast simulator. All objects are
 * opaque handles; every call returns a status code and leaves a thread-local
 * message retrievable with rismc_last_error().
 */
#ifndef RISMC_RISMC_H
#define RISMC_RISMC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RISMC_BUILDING_LIBRARY)
#define RISMC_API __declspec(dllexport)
#else
#define RISMC_API __declspec(dllimport)
#endif
#else
#define RISMC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rismc_status
{
  RISMC_OK = 0,
  RISMC_ERR_INVALID_ARGUMENT = 1,
  RISMC_ERR_PARSE = 2,
  RISMC_ERR_CONFIG = 3,
  RISMC_ERR_INFEASIBLE = 4,
  RISMC_ERR_SOLVER = 5,
  RISMC_ERR_IO = 6,
  RISMC_ERR_INTERNAL = 7
} rismc_status_t;

typedef struct rismc_scenario rismc_scenario_t;
typedef struct rismc_result rismc_result_t;

/* One (scheme, sweep value, trial) outcome. scheme points into storage owned
 * by the result handle. Skipped points have status 1 and NaN rates. */
typedef struct rismc_record
{
  const char *scheme;
  double sweep_value;
  int trial;
  uint64_t seed;
  uint64_t channel_hash;
  int status; /* 0 ok, 1 skipped */
  double sum_rate;
  int iterations;
  int terminated_by_tolerance;
} rismc_record_t;

RISMC_API const char *rismc_version(void);
RISMC_API const char *rismc_status_string(rismc_status_t status);
/* Message of the last failed call on this thread; empty after a success. */
RISMC_API const char *rismc_last_error(void);

RISMC_API rismc_status_t rismc_scenario_load_file(const char *path, rismc_scenario_t **out);
RISMC_API rismc_status_t rismc_scenario_load_string(const char *json, rismc_scenario_t **out);
RISMC_API rismc_status_t rismc_scenario_validate(const rismc_scenario_t *scenario);
RISMC_API rismc_status_t rismc_scenario_set_seed(rismc_scenario_t *scenario, uint64_t seed);
RISMC_API rismc_status_t rismc_scenario_set_trials(rismc_scenario_t *scenario, int trials);
RISMC_API rismc_status_t rismc_scenario_num_groups(const rismc_scenario_t *scenario, int *out);
RISMC_API void rismc_scenario_destroy(rismc_scenario_t *scenario);

/* threads = 0 selects RIS_SIM_THREADS, then the hardware concurrency. */
RISMC_API rismc_status_t rismc_run(const rismc_scenario_t *scenario, int threads,
                                   rismc_result_t **out);

/* format is "csv" or "json". */
RISMC_API rismc_status_t rismc_result_write(const rismc_result_t *result, const char *format,
                                            const char *path);
RISMC_API rismc_status_t rismc_result_num_records(const rismc_result_t *result, size_t *out);
RISMC_API rismc_status_t rismc_result_record(const rismc_result_t *result, size_t index,
                                             rismc_record_t *out);
/* Group minimum rates of one record; out must hold num_groups values. */
RISMC_API rismc_status_t rismc_result_min_rates(const rismc_result_t *result, size_t index,
                                                double *out, size_t capacity);
RISMC_API rismc_status_t rismc_result_num_groups(const rismc_result_t *result, int *out);
RISMC_API rismc_status_t rismc_result_num_points(const rismc_result_t *result, size_t *out);
/* Mean sum rate over the non-skipped trials of one (scheme, sweep value) point. */
RISMC_API rismc_status_t rismc_result_point(const rismc_result_t *result, size_t index,
                                            const char **scheme, double *sweep_value,
                                            double *mean, double *std_error, int *n,
                                            int *skipped);
RISMC_API rismc_status_t rismc_result_elapsed(const rismc_result_t *result, double *seconds);
RISMC_API void rismc_result_destroy(rismc_result_t *result);

RISMC_API size_t rismc_preset_count(void);
RISMC_API const char *rismc_preset_name(size_t index);
RISMC_API const char *rismc_preset_description(size_t index);

#ifdef __cplusplus
}
#endif

#endif /* RISMC_RISMC_H */
