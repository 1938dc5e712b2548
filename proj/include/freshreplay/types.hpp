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

#ifndef FRESHREPLAY_TYPES_HPP
#define FRESHREPLAY_TYPES_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

/**
 * \file
 * \brief Episode data shared by the buffer, the environments and the trainer.
 */

namespace freshreplay {

using TrajectoryId = std::uint64_t;

/// One environment transition together with the behavior policy's log-probability of the action.
struct Step {
  std::int32_t state_id = 0;
  std::int32_t action_id = 0;
  double reward = 0.0;
  double behavior_logprob = 0.0;
  std::int32_t next_state_id = 0;
  bool terminal = false;

  friend bool operator==(const Step&, const Step&) = default;
};

/// A complete episode. Returns are undiscounted.
struct Trajectory {
  std::vector<Step> steps;
  double episode_return = 0.0;
  /// Global gradient step at which the episode was generated.
  std::int64_t collection_step = 0;
  /// Assigned by the replay buffer on insertion; zero until then.
  TrajectoryId trajectory_id = 0;
  /// Version of the behavior policy snapshot that generated the episode.
  std::int64_t behavior_version = 0;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Builds a trajectory whose return is the left-to-right sum of the step rewards.
Trajectory make_trajectory(std::vector<Step> steps, std::int64_t collection_step,
                           std::int64_t behavior_version = 0);

/// Sum of rewards in step order; the exact value `episode_return` must hold.
double sum_rewards(std::span<const Step> steps) noexcept;

/**
 * Checks the structural invariants of a trajectory and throws `Error(kInvalidArgument)`
 * naming the first violation: non-positive-probability log-probs, negative indices,
 * a terminal flag before the last step, a return that is not the reward sum, or
 * a negative collection step. `horizon == 0` disables the length check.
 */
void validate_trajectory(const Trajectory& trajectory, std::size_t horizon = 0);

/// Scalar signals a base priority can be derived from.
struct PrioritySignal {
  double reward = 0.0;
  std::optional<double> advantage;
  std::optional<double> td_error;

  friend bool operator==(const PrioritySignal&, const PrioritySignal&) = default;
};

}  // namespace freshreplay

#endif  // FRESHREPLAY_TYPES_HPP
