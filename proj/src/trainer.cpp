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

#include "freshreplay/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <chrono>
#include <future>

#include "freshreplay/error.hpp"
#include "freshreplay/priority.hpp"

namespace freshreplay {

std::vector<Trajectory> rollout(const PolicyState& behavior, GridEnv& env, std::size_t count, std::mt19937_64& rng,
                                std::int64_t collection_step) {
  if (behavior.num_states != env.num_states() || behavior.num_actions != kNumActions) {
    throw Error(ErrorCode::kInvalidArgument, "policy table does not match the environment");
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> probs(static_cast<std::size_t>(kNumActions));
  std::vector<Trajectory> episodes;
  episodes.reserve(count);
  for (std::size_t e = 0; e < count; ++e) {
    std::int32_t state = env.reset(rng());
    std::vector<Step> steps;
    while (!env.done()) {
      behavior.probs(state, probs);
      const double u = uniform(rng);
      std::int32_t action = kNumActions - 1;
      double cumulative = 0.0;
      for (std::int32_t a = 0; a < kNumActions; ++a) {
        cumulative += probs[static_cast<std::size_t>(a)];
        if (u < cumulative) {
          action = a;
          break;
        }
      }
      const auto outcome = env.step(static_cast<Action>(action));
      steps.push_back(Step{state, action, outcome.reward, behavior.log_prob(state, action), outcome.next_state,
                           outcome.done});
      state = outcome.next_state;
    }
    episodes.push_back(make_trajectory(std::move(steps), collection_step, behavior.version));
  }
  return episodes;
}

bool whiten(std::span<double> values) {
  if (values.size() < 2) {
    return false;
  }
  double mean = 0.0;
  for (const double v : values) {
    mean += v;
  }
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (const double v : values) {
    var += (v - mean) * (v - mean);
  }
  var /= static_cast<double>(values.size());
  if (!(var > 0.0)) {
    return false;
  }
  const double stddev = std::sqrt(var);
  for (auto& v : values) {
    v = (v - mean) / stddev;
  }
  return true;
}

PreparedBatch prepare_batch(const PolicyState& policy, std::span<const WeightedTrajectory> batch,
                            double advantage_clip) {
  if (batch.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "policy update needs a non-empty batch");
  }
  PreparedBatch prepared;
  prepared.trajectories.reserve(batch.size());
  std::vector<double> advantages;
  for (const auto& [trajectory, weight] : batch) {
    PreparedTrajectory out;
    out.is_weight = weight;
    out.steps.resize(trajectory->steps.size());
    double to_go = 0.0;
    for (std::size_t t = trajectory->steps.size(); t-- > 0;) {
      const auto& step = trajectory->steps[t];
      if (std::isnan(step.behavior_logprob) || step.behavior_logprob > 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "step is missing a valid behavior log-probability");
      }
      to_go += step.reward;
      auto& prepared_step = out.steps[t];
      prepared_step.state = step.state_id;
      prepared_step.action = step.action_id;
      prepared_step.behavior_logprob = step.behavior_logprob;
      prepared_step.return_to_go = to_go;
      prepared_step.advantage = to_go - policy.baseline[static_cast<std::size_t>(step.state_id)];
    }
    for (const auto& step : out.steps) {
      advantages.push_back(step.advantage);
    }
    prepared.trajectories.push_back(std::move(out));
  }

  prepared.whitened = whiten(advantages);
  std::size_t k = 0;
  for (auto& trajectory : prepared.trajectories) {
    for (auto& step : trajectory.steps) {
      step.advantage = std::clamp(advantages[k++], -advantage_clip, advantage_clip);
    }
  }
  return prepared;
}

Gradient compute_gradient(const PolicyState& policy, const PreparedBatch& batch, double clip_epsilon,
                          double value_weight) {
  Gradient gradient;
  gradient.logits.assign(policy.logits.size(), 0.0);
  gradient.baseline.assign(policy.baseline.size(), 0.0);
  std::vector<double> probs(static_cast<std::size_t>(policy.num_actions));
  const double batch_scale = 1.0 / static_cast<double>(batch.trajectories.size());
  std::size_t total_steps = 0;
  std::size_t clipped_steps = 0;
  double ratio_sum = 0.0;

  for (const auto& trajectory : batch.trajectories) {
    if (trajectory.steps.empty()) {
      continue;
    }
    const double scale = batch_scale * trajectory.is_weight / static_cast<double>(trajectory.steps.size());
    for (const auto& step : trajectory.steps) {
      policy.probs(step.state, probs);
      const double log_prob = policy.log_prob(step.state, step.action);
      const double ratio = std::exp(log_prob - step.behavior_logprob);
      const double clipped = std::clamp(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon);
      const double advantage = step.advantage;
      // The clipped ratio is flat outside the trust region, so only in-range steps move the logits.
      const bool in_range = ratio == clipped;
      const double surrogate = clipped * advantage;

      ++total_steps;
      ratio_sum += ratio;
      if (!in_range) {
        ++clipped_steps;
      }

      const double value_error =
          policy.baseline[static_cast<std::size_t>(step.state)] - step.return_to_go;
      gradient.loss += scale * (-surrogate + value_weight * 0.5 * value_error * value_error);
      gradient.baseline[static_cast<std::size_t>(step.state)] += scale * value_weight * value_error;

      if (in_range) {
        // d(-rho A)/d logit_b = -rho A (1[b = a] - pi(b|s)).
        auto row = std::span<double>(gradient.logits)
                       .subspan(static_cast<std::size_t>(step.state) * policy.num_actions, policy.num_actions);
        const double coefficient = -scale * ratio * advantage;
        for (std::size_t b = 0; b < row.size(); ++b) {
          const double indicator = static_cast<std::int32_t>(b) == step.action ? 1.0 : 0.0;
          row[b] += coefficient * (indicator - probs[b]);
        }
      }
    }
  }
  if (total_steps > 0) {
    gradient.clip_fraction = static_cast<double>(clipped_steps) / static_cast<double>(total_steps);
    gradient.mean_ratio = ratio_sum / static_cast<double>(total_steps);
  }
  return gradient;
}

UpdateStats policy_gradient_update(PolicyState& policy, std::span<const WeightedTrajectory> batch,
                                   const RunConfig& config, bool fit_baseline) {
  const auto prepared = prepare_batch(policy, batch, config.advantage_clip);
  const auto gradient = compute_gradient(policy, prepared, config.clip_epsilon, fit_baseline ? 1.0 : 0.0);
  for (std::size_t i = 0; i < policy.logits.size(); ++i) {
    policy.logits[i] -= config.learning_rate * gradient.logits[i];
  }
  for (std::size_t i = 0; i < policy.baseline.size(); ++i) {
    policy.baseline[i] -= config.baseline_learning_rate * gradient.baseline[i];
  }
  ++policy.version;

  UpdateStats stats;
  stats.loss = gradient.loss;
  stats.clip_fraction = gradient.clip_fraction;
  for (const auto& item : batch) {
    stats.mean_is_weight += item.is_weight;
    stats.steps += item.trajectory->steps.size();
  }
  stats.mean_is_weight /= static_cast<double>(batch.size());
  return stats;
}

PrioritySignal priority_signal(const Trajectory& trajectory, const PolicyState& policy) {
  PrioritySignal signal;
  signal.reward = trajectory.episode_return;
  if (trajectory.steps.empty()) {
    signal.advantage = 0.0;
    signal.td_error = 0.0;
    return signal;
  }
  const auto value = [&](std::int32_t state) { return policy.baseline[static_cast<std::size_t>(state)]; };
  signal.advantage = trajectory.episode_return - value(trajectory.steps.front().state_id);
  double sum_sq = 0.0;
  for (const auto& step : trajectory.steps) {
    const double bootstrap = step.terminal ? 0.0 : value(step.next_state_id);
    const double delta = step.reward + bootstrap - value(step.state_id);
    sum_sq += delta * delta;
  }
  signal.td_error = std::sqrt(sum_sq / static_cast<double>(trajectory.steps.size()));
  return signal;
}

Experiment::Experiment(RunConfig config)
    : config_(std::move(config)),
      env_(config_.env),
      policy_(env_.num_states(), kNumActions),
      behavior_(policy_) {
  ensure_valid(config_);
  std::seed_seq seq{static_cast<std::uint32_t>(config_.seed), static_cast<std::uint32_t>(config_.seed >> 32), 0x5eedU};
  rollout_rng_.seed(seq);
  if (config_.method != Method::kOnPolicy) {
    buffer_ = std::make_unique<ReplayBuffer>(BufferOptions::from(config_));
  }
}

void Experiment::refresh(std::int64_t step) {
  if (config_.priority.base_kind == BaseKind::kRewardMagnitude) {
    buffer_->refresh_priorities(step);
  } else {
    buffer_->recompute_base_priorities(
        [this](const Trajectory& trajectory, const PrioritySignal&) { return priority_signal(trajectory, policy_); },
        step);
  }
}

TrainMetrics Experiment::run_iteration() {
  TrainMetrics metrics;
  metrics.iteration = iteration_;
  last_update_versions_.clear();

  last_rollout_ = rollout(behavior_, env_, static_cast<std::size_t>(config_.rollout_batch), rollout_rng_,
                          policy_.version);
  for (const auto& trajectory : last_rollout_) {
    metrics.mean_return += trajectory.episode_return;
  }
  metrics.mean_return /= static_cast<double>(last_rollout_.size());

  const bool replay = buffer_ != nullptr;
  if (replay) {
    for (const auto& trajectory : last_rollout_) {
      buffer_->insert(trajectory, priority_signal(trajectory, policy_), policy_.version);
    }
  }

  double clip_weighted = 0.0;
  double is_weight_sum = 0.0;
  std::size_t is_weight_count = 0;
  std::size_t total_steps = 0;
  auto record = [&](const UpdateStats& stats) {
    clip_weighted += stats.clip_fraction * static_cast<double>(stats.steps);
    total_steps += stats.steps;
  };

  std::vector<WeightedTrajectory> fresh;
  fresh.reserve(last_rollout_.size());
  for (const auto& trajectory : last_rollout_) {
    fresh.push_back({&trajectory, 1.0});
    last_update_versions_.push_back(trajectory.behavior_version);
  }

  // The refresh scan only needs the post-update step number, so in reward mode it can
  // overlap the on-policy update.
  const bool overlap = replay && !config_.sync_refresh && config_.priority.base_kind == BaseKind::kRewardMagnitude;
  std::future<RefreshReport> pending;
  if (overlap) {
    pending = buffer_->refresh_async(policy_.version + 1);
  }
  record(policy_gradient_update(policy_, fresh, config_));
  if (overlap) {
    metrics.refresh_wall_time = pending.get().wall_time_seconds;
  } else if (replay) {
    const auto start = std::chrono::steady_clock::now();
    refresh(policy_.version);
    metrics.refresh_wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  if (replay) {
    double age_sum = 0.0;
    std::size_t sampled = 0;
    for (std::int64_t k = 0; k < config_.replay_ratio_k; ++k) {
      const auto batch = buffer_->sample_stratified(static_cast<std::size_t>(config_.batch_size_b),
                                                    beta_at(policy_.version, config_.priority));
      std::vector<WeightedTrajectory> weighted;
      weighted.reserve(batch.items.size());
      for (const auto& item : batch.items) {
        weighted.push_back({item.trajectory.get(), item.is_weight});
        last_update_versions_.push_back(item.trajectory->behavior_version);
        age_sum += static_cast<double>(policy_.version - item.collection_step);
        is_weight_sum += item.is_weight;
        ++sampled;
        ++is_weight_count;
      }
      record(policy_gradient_update(policy_, weighted, config_, false));
      if (config_.priority.base_kind != BaseKind::kRewardMagnitude) {
        refresh(policy_.version);
      }
    }
    metrics.mean_sampled_age = sampled > 0 ? age_sum / static_cast<double>(sampled) : 0.0;
    metrics.buffer_occupancy = buffer_->size();
  }

  metrics.mean_is_weight = is_weight_count > 0 ? is_weight_sum / static_cast<double>(is_weight_count) : 0.0;
  metrics.clip_fraction = total_steps > 0 ? clip_weighted / static_cast<double>(total_steps) : 0.0;
  metrics.gradient_steps = policy_.version;

  behavior_ = policy_;
  ++iteration_;
  return metrics;
}

}  // namespace freshreplay
