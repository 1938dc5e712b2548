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

#include "freshreplay/priority.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "freshreplay/error.hpp"

namespace freshreplay {

double base_priority(const PrioritySignal& signal, const PriorityConfig& config) {
  std::optional<double> value;
  switch (config.base_kind) {
    case BaseKind::kRewardMagnitude:
      value = signal.reward;
      break;
    case BaseKind::kAdvantageMagnitude:
      value = signal.advantage;
      break;
    case BaseKind::kTdErrorMagnitude:
      value = signal.td_error;
      break;
  }
  if (!value) {
    throw Error(ErrorCode::kInvalidArgument,
                "priority signal lacks the field required by " + std::string(to_string(config.base_kind)));
  }
  if (!std::isfinite(*value)) {
    throw Error(ErrorCode::kInvalidArgument, "priority signal is not finite");
  }
  return std::abs(*value) + config.epsilon;
}

double age_decay(double age, double tau) {
  if (!(age >= 0.0) || std::isinf(age)) {
    throw Error(ErrorCode::kInvalidArgument, "age must be non-negative and finite");
  }
  if (age == 0.0 || std::isinf(tau)) {
    return 1.0;
  }
  return std::exp(-age / tau);
}

double effective_priority(double base, double age, const PriorityConfig& config) {
  if (!(base > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "base priority must be positive");
  }
  const double decay = age_decay(age, config.tau);
  if (decay == 1.0) {
    return base;
  }
  return base * std::max(decay, kMinDecay);
}

double beta_at(std::int64_t step, const PriorityConfig& config) noexcept {
  if (config.beta_anneal_steps <= 0) {
    return config.beta_start;
  }
  if (step >= config.beta_anneal_steps) {
    return config.beta_end;
  }
  const double fraction = static_cast<double>(std::max<std::int64_t>(step, 0)) /
                          static_cast<double>(config.beta_anneal_steps);
  return config.beta_start + fraction * (config.beta_end - config.beta_start);
}

}  // namespace freshreplay
