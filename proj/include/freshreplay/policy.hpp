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

#ifndef FRESHREPLAY_POLICY_HPP
#define FRESHREPLAY_POLICY_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace freshreplay {

/// Tabular softmax policy with a state-value baseline.
struct PolicyState {
  std::int32_t num_states = 0;
  std::int32_t num_actions = 0;
  /// Row-major `num_states x num_actions` action preferences.
  std::vector<double> logits;
  std::vector<double> baseline;
  /// Number of gradient steps applied so far.
  std::int64_t version = 0;

  PolicyState() = default;
  PolicyState(std::int32_t states, std::int32_t actions);

  [[nodiscard]] std::span<const double> row(std::int32_t state) const;
  [[nodiscard]] std::span<double> row(std::int32_t state);

  /// log softmax(logits[state])[action].
  [[nodiscard]] double log_prob(std::int32_t state, std::int32_t action) const;

  /// Fills `out` (size num_actions) with softmax(logits[state]).
  void probs(std::int32_t state, std::span<double> out) const;

  friend bool operator==(const PolicyState&, const PolicyState&) = default;
};

/**
 * Checkpoint layout, little-endian:
 *   bytes 0-3   magic "FRPS"
 *   u32         format version (1)
 *   i32         num_states
 *   i32         num_actions
 *   i64         policy version
 *   f64[S*A]    logits, row-major
 *   f64[S]      baseline
 */
void write_checkpoint(const PolicyState& policy, std::ostream& out);
PolicyState read_checkpoint(std::istream& in);
void save_checkpoint(const PolicyState& policy, const std::string& path);
PolicyState load_checkpoint(const std::string& path);

}  // namespace freshreplay

#endif  // FRESHREPLAY_POLICY_HPP
