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

#ifndef FRESHREPLAY_TRAINER_HPP
#define FRESHREPLAY_TRAINER_HPP

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "freshreplay/config.hpp"
#include "freshreplay/envs.hpp"
#include "freshreplay/policy.hpp"
#include "freshreplay/replay_buffer.hpp"
#include "freshreplay/types.hpp"

namespace freshreplay {

/// Samples `count` episodes from `behavior`, recording log pi_behavior(a|s) on every step.
std::vector<Trajectory> rollout(const PolicyState& behavior, GridEnv& env, std::size_t count, std::mt19937_64& rng,
                                std::int64_t collection_step);

struct WeightedTrajectory {
  const Trajectory* trajectory = nullptr;
  double is_weight = 1.0;
};

struct PreparedStep {
  std::int32_t state = 0;
  std::int32_t action = 0;
  double behavior_logprob = 0.0;
  double return_to_go = 0.0;
  /// Whitened (when possible) and clipped advantage; treated as a constant by the loss.
  double advantage = 0.0;
};

struct PreparedTrajectory {
  std::vector<PreparedStep> steps;
  double is_weight = 1.0;
};

struct PreparedBatch {
  std::vector<PreparedTrajectory> trajectories;
  bool whitened = false;
};

/// Standardizes in place to mean 0 and population std 1. Returns false, leaving the values
/// untouched, when there are fewer than two values or their variance is zero.
bool whiten(std::span<double> values);

/**
 * Advantages `return_to_go - V(s)` under the current baseline, whitened across every
 * step of the batch, then clipped to [-advantage_clip, advantage_clip].
 * Throws `Error(kInvalidArgument)` on an empty batch or a step without a behavior log-prob.
 */
PreparedBatch prepare_batch(const PolicyState& policy, std::span<const WeightedTrajectory> batch,
                            double advantage_clip);

struct Gradient {
  std::vector<double> logits;
  std::vector<double> baseline;
  double loss = 0.0;
  /// Share of steps whose ratio lies outside [1 - clip, 1 + clip].
  double clip_fraction = 0.0;
  double mean_ratio = 0.0;
};

/**
 * Loss (1/B) sum_i w_i l_i where l_i averages, over the steps of trajectory i,
 *   -clip(rho, 1 - eps, 1 + eps) A + value_weight * 0.5 (V(s) - G)^2
 * with rho = exp(log pi(a|s) - log mu(a|s)). Returns the loss and its exact gradient
 * with respect to the logits and the baseline.
 */
Gradient compute_gradient(const PolicyState& policy, const PreparedBatch& batch, double clip_epsilon,
                          double value_weight = 1.0);

struct UpdateStats {
  double loss = 0.0;
  double clip_fraction = 0.0;
  double mean_is_weight = 0.0;
  std::size_t steps = 0;
};

/**
 * One plain gradient step, `learning_rate` for the logits and `baseline_learning_rate` for
 * V; increments `policy.version`. With `fit_baseline` false the value term is dropped and V
 * is left unchanged (replayed returns come from older policies).
 */
UpdateStats policy_gradient_update(PolicyState& policy, std::span<const WeightedTrajectory> batch,
                                   const RunConfig& config, bool fit_baseline = true);

/// Priority signals of a trajectory under the current baseline.
PrioritySignal priority_signal(const Trajectory& trajectory, const PolicyState& policy);

struct TrainMetrics {
  std::int64_t iteration = 0;
  double mean_return = 0.0;
  double mean_sampled_age = 0.0;
  double mean_is_weight = 0.0;
  double clip_fraction = 0.0;
  std::size_t buffer_occupancy = 0;
  double refresh_wall_time = 0.0;
  std::int64_t gradient_steps = 0;
};

/**
 * Full training state for one run: learner, frozen behavior snapshot, environment,
 * replay buffer and random streams.
 *
 * Each `run_iteration` rolls out the behavior policy, stores the episodes with their base
 * priorities, trains on the fresh batch, refreshes every priority against the new step,
 * performs `replay_ratio` prioritized importance-weighted updates, and finally copies the
 * learner into the behavior snapshot. On-policy runs skip the buffer entirely.
 */
class Experiment {
 public:
  explicit Experiment(RunConfig config);

  TrainMetrics run_iteration();

  [[nodiscard]] const RunConfig& config() const noexcept { return config_; }
  [[nodiscard]] const PolicyState& policy() const noexcept { return policy_; }
  [[nodiscard]] const PolicyState& behavior() const noexcept { return behavior_; }
  [[nodiscard]] const ReplayBuffer* buffer() const noexcept { return buffer_.get(); }
  [[nodiscard]] std::int64_t iteration() const noexcept { return iteration_; }
  [[nodiscard]] const std::vector<Trajectory>& last_rollout() const noexcept { return last_rollout_; }
  /// Behavior versions of every trajectory used by an update in the last iteration.
  [[nodiscard]] const std::vector<std::int64_t>& last_update_behavior_versions() const noexcept {
    return last_update_versions_;
  }

 private:
  void refresh(std::int64_t step);

  RunConfig config_;
  GridEnv env_;
  PolicyState policy_;
  PolicyState behavior_;
  std::unique_ptr<ReplayBuffer> buffer_;
  std::mt19937_64 rollout_rng_;
  std::int64_t iteration_ = 0;
  std::vector<Trajectory> last_rollout_;
  std::vector<std::int64_t> last_update_versions_;
};

}  // namespace freshreplay

#endif  // FRESHREPLAY_TRAINER_HPP
