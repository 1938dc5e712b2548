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

#ifndef FRESHREPLAY_PRIORITY_HPP
#define FRESHREPLAY_PRIORITY_HPP

#include <cstdint>

#include "freshreplay/config.hpp"
#include "freshreplay/types.hpp"

/**
 * \file
 * \brief Freshness-aware priorities: a base priority scaled by an exponential age decay.
 *
 * The decay mirrors the exponential loss of effective sample size a stored trajectory
 * suffers as the learner drifts away from the policy that collected it.
 */

namespace freshreplay {

/// Smallest decay factor applied before flooring, keeping leaves positive until eviction.
inline constexpr double kMinDecay = 1e-300;

/// |selected signal| + epsilon. Throws `Error(kInvalidArgument)` if the signal is missing or non-finite.
double base_priority(const PrioritySignal& signal, const PriorityConfig& config);

/// exp(-age / tau); exactly 1 when tau is infinite or age is zero. Age is in gradient steps and may be fractional.
double age_decay(double age, double tau);

/// base * age_decay(age, tau), floored at base * kMinDecay.
double effective_priority(double base, double age, const PriorityConfig& config);

/// Linear anneal from beta_start to beta_end, clamped; constant when no anneal is configured.
double beta_at(std::int64_t step, const PriorityConfig& config) noexcept;

}  // namespace freshreplay

#endif  // FRESHREPLAY_PRIORITY_HPP
