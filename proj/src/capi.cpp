// Copyright 2026 The FreshReplay Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "freshreplay/freshreplay.h"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "freshreplay/config.hpp"
#include "freshreplay/error.hpp"
#include "freshreplay/ess.hpp"
#include "freshreplay/priority.hpp"
#include "freshreplay/replay_buffer.hpp"
#include "freshreplay/staleness.hpp"
#include "freshreplay/trainer.hpp"

struct fr_config {
  freshreplay::RunConfig value;
};

struct fr_buffer {
  explicit fr_buffer(freshreplay::BufferOptions options) : buffer(std::move(options)) {}
  freshreplay::ReplayBuffer buffer;
  mutable std::atomic<bool> busy{false};
};

struct fr_experiment {
  explicit fr_experiment(freshreplay::RunConfig config) : experiment(std::move(config)) {}
  freshreplay::Experiment experiment;
  mutable std::atomic<bool> busy{false};
};

namespace {

using freshreplay::Error;
using freshreplay::ErrorCode;

thread_local std::string last_error;

struct ApiError {
  fr_status status;
  std::string message;
};

fr_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return FR_ERR_INVALID_ARGUMENT;
    case ErrorCode::kParse:
      return FR_ERR_PARSE;
    case ErrorCode::kValidation:
      return FR_ERR_VALIDATION;
    case ErrorCode::kNotFound:
      return FR_ERR_NOT_FOUND;
    case ErrorCode::kEmpty:
      return FR_ERR_EMPTY;
    case ErrorCode::kFrozenBase:
      return FR_ERR_FROZEN_BASE;
    case ErrorCode::kSupportViolation:
      return FR_ERR_SUPPORT;
    case ErrorCode::kIo:
      return FR_ERR_IO;
    case ErrorCode::kOutOfRange:
      return FR_ERR_OUT_OF_RANGE;
    case ErrorCode::kState:
      return FR_ERR_STATE;
    case ErrorCode::kInternal:
      return FR_ERR_INTERNAL;
  }
  return FR_ERR_INTERNAL;
}

template <class F>
fr_status guarded(F&& body) noexcept {
  try {
    body();
    return FR_OK;
  } catch (const ApiError& error) {
    last_error = error.message;
    return error.status;
  } catch (const Error& error) {
    last_error = error.what();
    return to_status(error.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return FR_ERR_INTERNAL;
  } catch (const std::exception& error) {
    last_error = error.what();
    return FR_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return FR_ERR_INTERNAL;
  }
}

template <class T>
void require(const T* pointer, const char* name) {
  if (pointer == nullptr) {
    throw ApiError{FR_ERR_NULL, std::string(name) + " must not be NULL"};
  }
}

/// Marks a handle in use for the duration of one call.
class Exclusive {
 public:
  explicit Exclusive(std::atomic<bool>& flag) : flag_(flag) {
    if (flag_.exchange(true, std::memory_order_acquire)) {
      throw ApiError{FR_ERR_STATE, "concurrent call on a single-owner handle"};
    }
  }
  ~Exclusive() { flag_.store(false, std::memory_order_release); }
  Exclusive(const Exclusive&) = delete;
  Exclusive& operator=(const Exclusive&) = delete;

 private:
  std::atomic<bool>& flag_;
};

void write_string(const std::string& text, char* buf, size_t cap, size_t* len) {
  if (len != nullptr) {
    *len = text.size();
  }
  if (buf == nullptr && cap == 0) {
    return;
  }
  require(buf, "buf");
  if (cap <= text.size()) {
    throw ApiError{FR_ERR_BUFFER_TOO_SMALL, "output buffer holds " + std::to_string(cap) + " bytes, need " +
                                                std::to_string(text.size() + 1)};
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
}

freshreplay::PrioritySignal to_signal(const fr_signal& signal) {
  freshreplay::PrioritySignal out;
  out.reward = signal.reward;
  if (signal.has_advantage != 0) {
    out.advantage = signal.advantage;
  }
  if (signal.has_td_error != 0) {
    out.td_error = signal.td_error;
  }
  return out;
}

fr_divergence to_c(const freshreplay::ess::DivergenceReport& report) {
  return fr_divergence{report.var_rho, report.chi2,         report.kl,      report.renyi2,
                       report.ess,     report.n,            report.ess_kl_bound, report.mean_rho};
}

freshreplay::ess::DiscreteDist dist(const double* probs, size_t support) {
  return freshreplay::ess::DiscreteDist(std::vector<double>(probs, probs + support));
}

}  // namespace

extern "C" {

const char* fr_version(void) { return "1.0.0"; }

const char* fr_last_error(void) { return last_error.c_str(); }

const char* fr_status_name(fr_status status) {
  switch (status) {
    case FR_OK:
      return "ok";
    case FR_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case FR_ERR_PARSE:
      return "parse";
    case FR_ERR_VALIDATION:
      return "validation";
    case FR_ERR_NOT_FOUND:
      return "not_found";
    case FR_ERR_EMPTY:
      return "empty";
    case FR_ERR_FROZEN_BASE:
      return "frozen_base";
    case FR_ERR_SUPPORT:
      return "support_violation";
    case FR_ERR_IO:
      return "io";
    case FR_ERR_OUT_OF_RANGE:
      return "out_of_range";
    case FR_ERR_STATE:
      return "state";
    case FR_ERR_NULL:
      return "null";
    case FR_ERR_BUFFER_TOO_SMALL:
      return "buffer_too_small";
    case FR_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

// ---- configuration ---------------------------------------------------------

fr_status fr_config_new(fr_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new fr_config{};
  });
}

fr_status fr_config_load(const char* path, fr_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new fr_config{freshreplay::load_config_file(path)};
  });
}

fr_status fr_config_parse(const char* text, fr_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new fr_config{freshreplay::parse_config(text)};
  });
}

fr_status fr_config_clone(const fr_config* config, fr_config** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = new fr_config{config->value};
  });
}

fr_status fr_config_set(fr_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    freshreplay::set_field(config->value, key, value);
  });
}

fr_status fr_config_get(const fr_config* config, const char* key, char* buf, size_t cap, size_t* len) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    write_string(freshreplay::get_field(config->value, key), buf, cap, len);
  });
}

fr_status fr_config_serialize(const fr_config* config, char* buf, size_t cap, size_t* len) {
  return guarded([&] {
    require(config, "config");
    write_string(freshreplay::serialize_config(config->value), buf, cap, len);
  });
}

fr_status fr_config_validate(const fr_config* config) {
  return guarded([&] {
    require(config, "config");
    freshreplay::ensure_valid(config->value);
  });
}

fr_status fr_config_equal(const fr_config* a, const fr_config* b, int32_t* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = a->value == b->value ? 1 : 0;
  });
}

void fr_config_free(fr_config* config) { delete config; }

// ---- replay buffer ---------------------------------------------------------

fr_status fr_buffer_open(const fr_config* config, fr_buffer** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    freshreplay::ensure_valid(config->value);
    *out = new fr_buffer(freshreplay::BufferOptions::from(config->value));
  });
}

fr_status fr_buffer_insert(fr_buffer* buffer, const fr_trajectory_record* trajectory, const fr_signal* signal,
                           int64_t current_step, uint64_t* out_id) {
  return guarded([&] {
    require(buffer, "buffer");
    require(trajectory, "trajectory");
    require(signal, "signal");
    if (trajectory->num_steps > 0) {
      require(trajectory->steps, "trajectory->steps");
    }
    Exclusive exclusive(buffer->busy);
    std::vector<freshreplay::Step> steps;
    steps.reserve(trajectory->num_steps);
    for (size_t t = 0; t < trajectory->num_steps; ++t) {
      const auto& s = trajectory->steps[t];
      steps.push_back({s.state_id, s.action_id, s.reward, s.behavior_logprob, s.next_state_id, s.terminal != 0});
    }
    auto record = freshreplay::make_trajectory(std::move(steps), trajectory->collection_step,
                                               trajectory->behavior_version);
    buffer->buffer.insert(std::move(record), to_signal(*signal), current_step);
    if (out_id != nullptr) {
      *out_id = buffer->buffer.last_inserted_id();
    }
  });
}

fr_status fr_buffer_sample(fr_buffer* buffer, size_t batch_size, double beta, fr_sample* out) {
  return guarded([&] {
    require(buffer, "buffer");
    require(out, "out");
    Exclusive exclusive(buffer->busy);
    const auto batch = buffer->buffer.sample_stratified(batch_size, beta);
    for (size_t i = 0; i < batch.items.size(); ++i) {
      const auto& item = batch.items[i];
      out[i] = fr_sample{item.trajectory_id,      item.slot,        item.collection_step,
                         item.effective_priority, item.probability, item.is_weight};
    }
  });
}

fr_status fr_buffer_refresh(fr_buffer* buffer, int64_t current_step, fr_refresh_report* out) {
  return guarded([&] {
    require(buffer, "buffer");
    Exclusive exclusive(buffer->busy);
    const auto report = buffer->buffer.refresh_priorities(current_step);
    if (out != nullptr) {
      *out = fr_refresh_report{report.entries_scanned, report.wall_time_seconds};
    }
  });
}

fr_status fr_buffer_update_signal(fr_buffer* buffer, uint64_t trajectory_id, const fr_signal* signal) {
  return guarded([&] {
    require(buffer, "buffer");
    require(signal, "signal");
    Exclusive exclusive(buffer->busy);
    buffer->buffer.update_base_priority(trajectory_id, to_signal(*signal));
  });
}

fr_status fr_buffer_size(const fr_buffer* buffer, size_t* out) {
  return guarded([&] {
    require(buffer, "buffer");
    require(out, "out");
    *out = buffer->buffer.size();
  });
}

fr_status fr_buffer_entry(const fr_buffer* buffer, uint64_t trajectory_id, fr_entry* out) {
  return guarded([&] {
    require(buffer, "buffer");
    require(out, "out");
    Exclusive exclusive(buffer->busy);
    const auto view = buffer->buffer.entry(trajectory_id);
    const auto trajectory = buffer->buffer.trajectory(trajectory_id);
    *out = fr_entry{view.trajectory_id,
                    view.slot,
                    view.collection_step,
                    view.base_priority,
                    view.effective_priority,
                    view.transformed,
                    trajectory->episode_return,
                    trajectory->steps.size()};
  });
}

fr_status fr_buffer_copy_steps(const fr_buffer* buffer, uint64_t trajectory_id, fr_step* out, size_t cap,
                               size_t* len) {
  return guarded([&] {
    require(buffer, "buffer");
    Exclusive exclusive(buffer->busy);
    const auto trajectory = buffer->buffer.trajectory(trajectory_id);
    const auto& steps = trajectory->steps;
    if (len != nullptr) {
      *len = steps.size();
    }
    if (out == nullptr && cap == 0) {
      return;
    }
    require(out, "out");
    if (cap < steps.size()) {
      throw ApiError{FR_ERR_BUFFER_TOO_SMALL, "step buffer too small"};
    }
    for (size_t t = 0; t < steps.size(); ++t) {
      const auto& s = steps[t];
      out[t] = fr_step{s.state_id, s.action_id, s.reward, s.behavior_logprob, s.next_state_id, s.terminal ? 1 : 0};
    }
  });
}

fr_status fr_buffer_snapshot(const fr_buffer* buffer, char* buf, size_t cap, size_t* len) {
  return guarded([&] {
    require(buffer, "buffer");
    Exclusive exclusive(buffer->busy);
    write_string(buffer->buffer.snapshot(), buf, cap, len);
  });
}

void fr_buffer_close(fr_buffer* buffer) { delete buffer; }

// ---- priorities ------------------------------------------------------------

fr_status fr_age_decay(double age, double tau, double* out) {
  return guarded([&] {
    require(out, "out");
    if (!(tau > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
    }
    *out = freshreplay::age_decay(age, tau);
  });
}

fr_status fr_effective_priority(double base, double age, double tau, double* out) {
  return guarded([&] {
    require(out, "out");
    if (!(tau > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "tau must be positive");
    }
    freshreplay::PriorityConfig config;
    config.tau = tau;
    *out = freshreplay::effective_priority(base, age, config);
  });
}

// ---- training --------------------------------------------------------------

fr_status fr_experiment_create(const fr_config* config, fr_experiment** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = new fr_experiment(config->value);
  });
}

fr_status fr_experiment_run_iteration(fr_experiment* experiment, fr_metrics* out) {
  return guarded([&] {
    require(experiment, "experiment");
    Exclusive exclusive(experiment->busy);
    const auto m = experiment->experiment.run_iteration();
    if (out != nullptr) {
      *out = fr_metrics{m.iteration,      m.mean_return,      m.mean_sampled_age,  m.mean_is_weight,
                        m.clip_fraction,  m.buffer_occupancy, m.refresh_wall_time, m.gradient_steps};
    }
  });
}

fr_status fr_experiment_policy_shape(const fr_experiment* experiment, size_t* num_states, size_t* num_actions) {
  return guarded([&] {
    require(experiment, "experiment");
    const auto& policy = experiment->experiment.policy();
    if (num_states != nullptr) {
      *num_states = static_cast<size_t>(policy.num_states);
    }
    if (num_actions != nullptr) {
      *num_actions = static_cast<size_t>(policy.num_actions);
    }
  });
}

fr_status fr_experiment_copy_policy(const fr_experiment* experiment, double* logits, double* baseline,
                                    int64_t* version) {
  return guarded([&] {
    require(experiment, "experiment");
    Exclusive exclusive(experiment->busy);
    const auto& policy = experiment->experiment.policy();
    if (logits != nullptr) {
      std::copy(policy.logits.begin(), policy.logits.end(), logits);
    }
    if (baseline != nullptr) {
      std::copy(policy.baseline.begin(), policy.baseline.end(), baseline);
    }
    if (version != nullptr) {
      *version = policy.version;
    }
  });
}

fr_status fr_experiment_save_checkpoint(const fr_experiment* experiment, const char* path) {
  return guarded([&] {
    require(experiment, "experiment");
    require(path, "path");
    Exclusive exclusive(experiment->busy);
    freshreplay::save_checkpoint(experiment->experiment.policy(), path);
  });
}

void fr_experiment_free(fr_experiment* experiment) { delete experiment; }

// ---- importance sampling diagnostics ---------------------------------------

fr_status fr_importance_ratios(const double* target, const double* behavior, size_t support, double* out) {
  return guarded([&] {
    require(target, "target");
    require(behavior, "behavior");
    require(out, "out");
    const auto ratios = freshreplay::ess::importance_ratios(dist(target, support), dist(behavior, support));
    std::copy(ratios.begin(), ratios.end(), out);
  });
}

fr_status fr_divergence_report(const double* target, const double* behavior, size_t support, double n,
                               fr_divergence* out) {
  return guarded([&] {
    require(target, "target");
    require(behavior, "behavior");
    require(out, "out");
    *out = to_c(freshreplay::ess::divergence_report(dist(target, support), dist(behavior, support), n));
  });
}

fr_status fr_empirical_ess(const double* weights, size_t count, double* out) {
  return guarded([&] {
    require(out, "out");
    if (count > 0) {
      require(weights, "weights");
    }
    *out = freshreplay::ess::empirical_ess(std::span<const double>(weights, count));
  });
}

fr_status fr_drift_ess_curve(const double* path, size_t path_len, size_t support, size_t behavior_index, double n,
                             fr_divergence* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::vector<freshreplay::ess::DiscreteDist> dists;
    dists.reserve(path_len);
    for (size_t i = 0; i < path_len; ++i) {
      dists.push_back(dist(path + i * support, support));
    }
    const auto curve = freshreplay::ess::drift_ess_curve(dists, behavior_index, n);
    for (size_t i = 0; i < curve.size(); ++i) {
      out[i] = to_c(curve[i].report);
    }
  });
}

fr_status fr_linear_logit_drift_path(double gap_per_step, size_t steps, double* out) {
  return guarded([&] {
    require(out, "out");
    const auto path = freshreplay::ess::linear_logit_drift_path(gap_per_step, steps);
    for (size_t i = 0; i < path.size(); ++i) {
      out[2 * i] = path[i][0];
      out[2 * i + 1] = path[i][1];
    }
  });
}

// ---- staleness workload ----------------------------------------------------

void fr_staleness_params_default(fr_staleness_params* out) {
  if (out == nullptr) {
    return;
  }
  const freshreplay::StalenessParams defaults;
  *out = fr_staleness_params{defaults.steps,   defaults.early_steps, defaults.early_base, defaults.late_base,
                             defaults.alpha,   defaults.epsilon,     defaults.tau_a,      defaults.tau_b,
                             defaults.batch_size, defaults.seed};
}

fr_status fr_staleness_run(const fr_staleness_params* params, fr_staleness_row* rows, size_t rows_cap,
                           fr_staleness_summary* out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    if (rows != nullptr && params->steps > 0 && rows_cap < static_cast<size_t>(params->steps)) {
      throw ApiError{FR_ERR_BUFFER_TOO_SMALL, "rows buffer smaller than the step count"};
    }
    freshreplay::StalenessParams native;
    native.steps = params->steps;
    native.early_steps = params->early_steps;
    native.early_base = params->early_base;
    native.late_base = params->late_base;
    native.alpha = params->alpha;
    native.epsilon = params->epsilon;
    native.tau_a = params->tau_a;
    native.tau_b = params->tau_b;
    native.batch_size = params->batch_size;
    native.seed = params->seed;
    const auto result = freshreplay::run_staleness_workload(native);
    if (rows != nullptr) {
      for (size_t i = 0; i < result.rows.size(); ++i) {
        const auto& row = result.rows[i];
        rows[i] = fr_staleness_row{row.step, row.expected_age_a, row.expected_age_b, row.sampled_age_a,
                                   row.sampled_age_b};
      }
    }
    *out = fr_staleness_summary{result.mean_age_a,         result.mean_age_b, result.mean_sampled_age_a,
                                result.mean_sampled_age_b, result.gap,        result.rows.size()};
  });
}

}  // extern "C"
