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

#include "freshreplay/types.hpp"

#include <cmath>
#include <string>

#include "freshreplay/error.hpp"

namespace freshreplay {

double sum_rewards(std::span<const Step> steps) noexcept {
  double total = 0.0;
  for (const auto& step : steps) {
    total += step.reward;
  }
  return total;
}

Trajectory make_trajectory(std::vector<Step> steps, std::int64_t collection_step,
                           std::int64_t behavior_version) {
  Trajectory trajectory;
  trajectory.episode_return = sum_rewards(steps);
  trajectory.steps = std::move(steps);
  trajectory.collection_step = collection_step;
  trajectory.behavior_version = behavior_version;
  return trajectory;
}

void validate_trajectory(const Trajectory& trajectory, std::size_t horizon) {
  auto fail = [](const std::string& message) {
    throw Error(ErrorCode::kInvalidArgument, "invalid trajectory: " + message);
  };
  if (trajectory.collection_step < 0) {
    fail("collection_step must be non-negative");
  }
  if (horizon != 0 && trajectory.steps.size() > horizon) {
    fail("length " + std::to_string(trajectory.steps.size()) + " exceeds horizon " +
         std::to_string(horizon));
  }
  for (std::size_t t = 0; t < trajectory.steps.size(); ++t) {
    const auto& step = trajectory.steps[t];
    if (step.state_id < 0 || step.action_id < 0 || step.next_state_id < 0) {
      fail("negative state or action index at step " + std::to_string(t));
    }
    if (!std::isfinite(step.reward)) {
      fail("non-finite reward at step " + std::to_string(t));
    }
    if (std::isnan(step.behavior_logprob) || step.behavior_logprob > 0.0) {
      fail("behavior_logprob must be <= 0 at step " + std::to_string(t));
    }
    if (step.terminal && t + 1 != trajectory.steps.size()) {
      fail("terminal flag before the final step (step " + std::to_string(t) + ")");
    }
  }
  if (trajectory.episode_return != sum_rewards(trajectory.steps)) {
    fail("episode_return does not equal the sum of step rewards");
  }
}

}  // namespace freshreplay
