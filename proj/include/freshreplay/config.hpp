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

#ifndef FRESHREPLAY_CONFIG_HPP
#define FRESHREPLAY_CONFIG_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace freshreplay {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class BaseKind { kRewardMagnitude, kAdvantageMagnitude, kTdErrorMagnitude };
enum class EvictionPolicy { kLowestEffectivePriority, kFifo };
enum class Method { kOnPolicy, kStandardPer, kFreshPer };
enum class EnvKind { kCliffWalking, kFrozenLake };

std::string_view to_string(BaseKind kind) noexcept;
std::string_view to_string(EvictionPolicy policy) noexcept;
std::string_view to_string(Method method) noexcept;
std::string_view to_string(EnvKind env) noexcept;

struct PriorityConfig {
  double alpha = 0.6;
  double beta_start = 0.4;
  double beta_end = 1.0;
  /// Zero keeps beta constant at `beta_start`.
  std::int64_t beta_anneal_steps = 0;
  /// Age decay constant in gradient steps; infinity disables decay.
  double tau = 500.0;
  double epsilon = 0.01;
  BaseKind base_kind = BaseKind::kRewardMagnitude;

  friend bool operator==(const PriorityConfig&, const PriorityConfig&) = default;
};

struct RunConfig {
  PriorityConfig priority;
  std::int64_t buffer_capacity = 50000;
  EvictionPolicy eviction_policy = EvictionPolicy::kLowestEffectivePriority;
  std::int64_t replay_ratio_k = 2;
  std::int64_t batch_size_b = 128;
  std::int64_t rollout_batch = 128;
  double clip_epsilon = 0.2;
  double advantage_clip = 0.2;
  /// Policy logit step size. Tabular desk scale; see README for why this is not 1e-6.
  double learning_rate = 100.0;
  /// Baseline step size. Above 1 the value update can overshoot on frequently visited states.
  double baseline_learning_rate = 1.0;
  std::int64_t max_iterations = 400;
  /// Run the priority refresh on the training thread instead of a background task.
  bool sync_refresh = true;
  std::uint64_t seed = 42;
  Method method = Method::kFreshPer;
  EnvKind env = EnvKind::kCliffWalking;

  /// Decay constant actually applied: infinite for standard PER regardless of `priority.tau`.
  [[nodiscard]] double effective_tau() const noexcept {
    return method == Method::kStandardPer ? kInfinity : priority.tau;
  }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Returns one message per violated invariant; empty means the config is valid.
std::vector<std::string> validate(const PriorityConfig& config);
std::vector<std::string> validate(const RunConfig& config);

/// Throws `Error(kValidation)` listing every violation.
void ensure_valid(const RunConfig& config);

/// Names of every key accepted by the config file format, in serialization order.
std::vector<std::string> config_keys();

/// Assigns one field from its textual form. Throws `Error(kParse)` on unknown keys or bad values.
void set_field(RunConfig& config, std::string_view key, std::string_view value);

/// Textual form of one field, exactly as `serialize_config` writes it.
std::string get_field(const RunConfig& config, std::string_view key);

/// `key = value` lines for every field; parses back to an identical config.
std::string serialize_config(const RunConfig& config);

/**
 * Parses the flat `section.key = value` format. `#` starts a comment. Unset keys keep
 * their defaults. Unknown or repeated keys are errors reported with their line number.
 */
RunConfig parse_config(std::string_view text);

RunConfig load_config_file(const std::string& path);

}  // namespace freshreplay

#endif  // FRESHREPLAY_CONFIG_HPP
