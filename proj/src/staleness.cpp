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

#include "freshreplay/staleness.hpp"

#include "freshreplay/error.hpp"
#include "freshreplay/replay_buffer.hpp"

namespace freshreplay {

namespace {

struct Arm {
  explicit Arm(const StalenessParams& params, double tau) : buffer(options(params, tau)) {}

  static BufferOptions options(const StalenessParams& params, double tau) {
    BufferOptions options;
    options.priority.alpha = params.alpha;
    options.priority.epsilon = params.epsilon;
    options.priority.tau = tau;
    options.capacity = static_cast<std::size_t>(params.steps);
    options.seed = params.seed;
    return options;
  }

  double expected_age(std::int64_t step) const {
    double mass = 0.0;
    double weighted = 0.0;
    for (const auto& entry : buffer.entries()) {
      mass += entry.transformed;
      weighted += entry.transformed * static_cast<double>(step - entry.collection_step);
    }
    return weighted / mass;
  }

  double sampled_age(std::int64_t step, std::size_t batch_size) {
    const auto batch = buffer.sample_stratified(batch_size, 0.0);
    double total = 0.0;
    for (const auto& item : batch.items) {
      total += static_cast<double>(step - item.collection_step);
    }
    return total / static_cast<double>(batch.items.size());
  }

  ReplayBuffer buffer;
};

}  // namespace

StalenessResult run_staleness_workload(const StalenessParams& params) {
  if (params.steps <= 0 || params.early_steps < 0 || params.batch_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "staleness workload needs positive steps and batch size");
  }
  if (!(params.early_base > params.epsilon) || !(params.late_base > params.epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "base priorities must exceed epsilon");
  }
  Arm a(params, params.tau_a);
  Arm b(params, params.tau_b);

  StalenessResult result;
  result.rows.reserve(static_cast<std::size_t>(params.steps));
  for (std::int64_t step = 0; step < params.steps; ++step) {
    const double base = step < params.early_steps ? params.early_base : params.late_base;
    // |reward| + epsilon reproduces the intended base exactly up to rounding.
    const PrioritySignal signal{base - params.epsilon, std::nullopt, std::nullopt};
    for (Arm* arm : {&a, &b}) {
      arm->buffer.insert(make_trajectory({}, step), signal, step);
      arm->buffer.refresh_priorities(step);
    }
    StalenessRow row;
    row.step = step;
    row.expected_age_a = a.expected_age(step);
    row.expected_age_b = b.expected_age(step);
    row.sampled_age_a = a.sampled_age(step, params.batch_size);
    row.sampled_age_b = b.sampled_age(step, params.batch_size);
    result.rows.push_back(row);
  }

  const double count = static_cast<double>(result.rows.size());
  for (const auto& row : result.rows) {
    result.mean_age_a += row.expected_age_a / count;
    result.mean_age_b += row.expected_age_b / count;
    result.mean_sampled_age_a += row.sampled_age_a / count;
    result.mean_sampled_age_b += row.sampled_age_b / count;
  }
  result.gap = result.mean_age_b > 0.0 ? (result.mean_age_b - result.mean_age_a) / result.mean_age_b : 0.0;
  return result;
}

}  // namespace freshreplay
