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

#ifndef FRESHREPLAY_STALENESS_HPP
#define FRESHREPLAY_STALENESS_HPP

#include <cstdint>
#include <limits>
#include <vector>

namespace freshreplay {

/**
 * Scripted workload showing how old high-priority entries dominate sampling without
 * age decay: one insertion per step, the first `early_steps` with a high base priority
 * and all later ones with a low base, a full refresh after every insertion.
 */
struct StalenessParams {
  std::int64_t steps = 2000;
  std::int64_t early_steps = 100;
  double early_base = 10.0;
  double late_base = 1.0;
  double alpha = 0.6;
  double epsilon = 0.01;
  double tau_a = 500.0;
  double tau_b = std::numeric_limits<double>::infinity();
  /// Stratified draws per step for the empirical column.
  std::size_t batch_size = 32;
  std::uint64_t seed = 42;
};

struct StalenessRow {
  std::int64_t step = 0;
  /// Expected age of a sampled entry under the exact sampling distribution.
  double expected_age_a = 0.0;
  double expected_age_b = 0.0;
  /// Mean age over the stratified draws taken at this step.
  double sampled_age_a = 0.0;
  double sampled_age_b = 0.0;
};

struct StalenessResult {
  std::vector<StalenessRow> rows;
  /// Averages of the exact per-step expectations.
  double mean_age_a = 0.0;
  double mean_age_b = 0.0;
  double mean_sampled_age_a = 0.0;
  double mean_sampled_age_b = 0.0;
  /// (mean_age_b - mean_age_a) / mean_age_b; 0 when mean_age_b is 0.
  double gap = 0.0;
};

StalenessResult run_staleness_workload(const StalenessParams& params);

}  // namespace freshreplay

#endif  // FRESHREPLAY_STALENESS_HPP
