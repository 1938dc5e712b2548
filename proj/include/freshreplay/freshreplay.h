/*
 * Copyright 2026 The FreshReplay Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to libfreshreplay.
 *
 * Conventions:
 *  - Every fallible function returns fr_status. On failure, fr_last_error() returns a
 *    message for the most recent failing call on the calling thread.
 *  - Handles are opaque and single-owner. Calling into one handle from two threads at
 *    once fails with FR_ERR_STATE where it is detected.
 *  - String outputs take (buf, cap, len): *len receives the length without the
 *    terminating NUL; if cap <= *len nothing is written and FR_ERR_BUFFER_TOO_SMALL is
 *    returned. Pass buf = NULL, cap = 0 to query the length.
 *  - Handles are released with the matching *_free / *_close function; NULL is accepted.
 */

#ifndef FRESHREPLAY_H
#define FRESHREPLAY_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FRESHREPLAY_BUILDING)
#define FR_API __declspec(dllexport)
#else
#define FR_API __declspec(dllimport)
#endif
#else
#define FR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define FR_API_VERSION_MAJOR 1
#define FR_API_VERSION_MINOR 0
#define FR_API_VERSION_PATCH 0

typedef enum fr_status {
  FR_OK = 0,
  FR_ERR_INVALID_ARGUMENT = 1,
  FR_ERR_PARSE = 2,
  FR_ERR_VALIDATION = 3,
  FR_ERR_NOT_FOUND = 4,
  FR_ERR_EMPTY = 5,
  FR_ERR_FROZEN_BASE = 6,
  FR_ERR_SUPPORT = 7,
  FR_ERR_IO = 8,
  FR_ERR_OUT_OF_RANGE = 9,
  FR_ERR_STATE = 10,
  FR_ERR_NULL = 11,
  FR_ERR_BUFFER_TOO_SMALL = 12,
  FR_ERR_INTERNAL = 99
} fr_status;

FR_API const char* fr_version(void);
FR_API const char* fr_last_error(void);
FR_API const char* fr_status_name(fr_status status);

/* ---- configuration ---------------------------------------------------- */

typedef struct fr_config fr_config;

FR_API fr_status fr_config_new(fr_config** out);
FR_API fr_status fr_config_load(const char* path, fr_config** out);
FR_API fr_status fr_config_parse(const char* text, fr_config** out);
FR_API fr_status fr_config_clone(const fr_config* config, fr_config** out);
/* Assigns one dotted key, e.g. ("priority.tau", "inf"). */
FR_API fr_status fr_config_set(fr_config* config, const char* key, const char* value);
FR_API fr_status fr_config_get(const fr_config* config, const char* key, char* buf, size_t cap, size_t* len);
FR_API fr_status fr_config_serialize(const fr_config* config, char* buf, size_t cap, size_t* len);
/* FR_ERR_VALIDATION lists every violated invariant in fr_last_error(). */
FR_API fr_status fr_config_validate(const fr_config* config);
FR_API fr_status fr_config_equal(const fr_config* a, const fr_config* b, int32_t* out);
FR_API void fr_config_free(fr_config* config);

/* ---- replay buffer ---------------------------------------------------- */

typedef struct fr_buffer fr_buffer;

typedef struct fr_step {
  int32_t state_id;
  int32_t action_id;
  double reward;
  double behavior_logprob;
  int32_t next_state_id;
  int32_t terminal;
} fr_step;

/* episode_return is derived from the step rewards. */
typedef struct fr_trajectory_record {
  const fr_step* steps;
  size_t num_steps;
  int64_t collection_step;
  int64_t behavior_version;
} fr_trajectory_record;

typedef struct fr_signal {
  double reward;
  double advantage;
  double td_error;
  int32_t has_advantage;
  int32_t has_td_error;
} fr_signal;

typedef struct fr_sample {
  uint64_t trajectory_id;
  uint64_t slot;
  int64_t collection_step;
  double effective_priority;
  double probability;
  double is_weight;
} fr_sample;

typedef struct fr_entry {
  uint64_t trajectory_id;
  uint64_t slot;
  int64_t collection_step;
  double base_priority;
  double effective_priority;
  double transformed_priority;
  double episode_return;
  uint64_t num_steps;
} fr_entry;

typedef struct fr_refresh_report {
  uint64_t entries_scanned;
  double wall_time_seconds;
} fr_refresh_report;

/* Uses the config's priority block (tau forced to infinity for standard_per), capacity,
 * eviction policy and seed. FRESHREPLAY_THREADS caps the refresh worker count. */
FR_API fr_status fr_buffer_open(const fr_config* config, fr_buffer** out);
FR_API fr_status fr_buffer_insert(fr_buffer* buffer, const fr_trajectory_record* trajectory, const fr_signal* signal,
                                  int64_t current_step, uint64_t* out_id);
/* Writes exactly batch_size samples to out. */
FR_API fr_status fr_buffer_sample(fr_buffer* buffer, size_t batch_size, double beta, fr_sample* out);
FR_API fr_status fr_buffer_refresh(fr_buffer* buffer, int64_t current_step, fr_refresh_report* out);
/* FR_ERR_FROZEN_BASE in reward_magnitude mode. */
FR_API fr_status fr_buffer_update_signal(fr_buffer* buffer, uint64_t trajectory_id, const fr_signal* signal);
FR_API fr_status fr_buffer_size(const fr_buffer* buffer, size_t* out);
FR_API fr_status fr_buffer_entry(const fr_buffer* buffer, uint64_t trajectory_id, fr_entry* out);
FR_API fr_status fr_buffer_copy_steps(const fr_buffer* buffer, uint64_t trajectory_id, fr_step* out, size_t cap,
                                      size_t* len);
/* Text snapshot, one "id collection_step base effective" line per entry. */
FR_API fr_status fr_buffer_snapshot(const fr_buffer* buffer, char* buf, size_t cap, size_t* len);
FR_API void fr_buffer_close(fr_buffer* buffer);

/* ---- priorities ------------------------------------------------------- */

FR_API fr_status fr_age_decay(double age, double tau, double* out);
FR_API fr_status fr_effective_priority(double base, double age, double tau, double* out);

/* ---- training --------------------------------------------------------- */

typedef struct fr_experiment fr_experiment;

typedef struct fr_metrics {
  int64_t iteration;
  double mean_return;
  double mean_sampled_age;
  double mean_is_weight;
  double clip_fraction;
  uint64_t buffer_occupancy;
  double refresh_wall_time;
  int64_t gradient_steps;
} fr_metrics;

/* Validates the config; FR_ERR_VALIDATION on failure. */
FR_API fr_status fr_experiment_create(const fr_config* config, fr_experiment** out);
FR_API fr_status fr_experiment_run_iteration(fr_experiment* experiment, fr_metrics* out);
FR_API fr_status fr_experiment_policy_shape(const fr_experiment* experiment, size_t* num_states,
                                            size_t* num_actions);
/* logits: num_states * num_actions row-major; baseline: num_states. Either may be NULL. */
FR_API fr_status fr_experiment_copy_policy(const fr_experiment* experiment, double* logits, double* baseline,
                                           int64_t* version);
FR_API fr_status fr_experiment_save_checkpoint(const fr_experiment* experiment, const char* path);
FR_API void fr_experiment_free(fr_experiment* experiment);

/* ---- importance sampling diagnostics ---------------------------------- */

typedef struct fr_divergence {
  double var_rho;
  double chi2;
  double kl;
  double renyi2;
  double ess;
  double n;
  double ess_kl_bound;
  double mean_rho;
} fr_divergence;

FR_API fr_status fr_importance_ratios(const double* target, const double* behavior, size_t support, double* out);
FR_API fr_status fr_divergence_report(const double* target, const double* behavior, size_t support, double n,
                                      fr_divergence* out);
FR_API fr_status fr_empirical_ess(const double* weights, size_t count, double* out);
/* path: path_len distributions of `support` probabilities each, row-major.
 * out: path_len - behavior_index reports, indexed by distance from the behavior. */
FR_API fr_status fr_drift_ess_curve(const double* path, size_t path_len, size_t support, size_t behavior_index,
                                    double n, fr_divergence* out);
/* Writes (steps + 1) two-point distributions, row-major. */
FR_API fr_status fr_linear_logit_drift_path(double gap_per_step, size_t steps, double* out);

/* ---- staleness workload ----------------------------------------------- */

typedef struct fr_staleness_params {
  int64_t steps;
  int64_t early_steps;
  double early_base;
  double late_base;
  double alpha;
  double epsilon;
  double tau_a;
  double tau_b;
  uint64_t batch_size;
  uint64_t seed;
} fr_staleness_params;

typedef struct fr_staleness_row {
  int64_t step;
  double expected_age_a;
  double expected_age_b;
  double sampled_age_a;
  double sampled_age_b;
} fr_staleness_row;

typedef struct fr_staleness_summary {
  double mean_age_a;
  double mean_age_b;
  double mean_sampled_age_a;
  double mean_sampled_age_b;
  double gap;
  uint64_t num_rows;
} fr_staleness_summary;

FR_API void fr_staleness_params_default(fr_staleness_params* out);
/* rows may be NULL (rows_cap 0) to get the summary only; otherwise rows_cap >= steps. */
FR_API fr_status fr_staleness_run(const fr_staleness_params* params, fr_staleness_row* rows, size_t rows_cap,
                                  fr_staleness_summary* out);

#ifdef __cplusplus
}
#endif

#endif /* FRESHREPLAY_H */
