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

#ifndef FRESHREPLAY_ENVS_HPP
#define FRESHREPLAY_ENVS_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "freshreplay/config.hpp"

namespace freshreplay {

enum class Action : std::int32_t { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr std::int32_t kNumActions = 4;

enum class Cell : std::uint8_t { kFloor, kStart, kGoal, kHole, kCliff };

struct Position {
  std::int32_t row = 0;
  std::int32_t col = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct EnvOutcome {
  std::int32_t next_state = 0;
  double reward = 0.0;
  bool done = false;
};

/**
 * Episodic gridworld. States are cell indices `row * cols + col`.
 *
 * - CliffWalking: 4x12, start (3,0), goal (3,11), cliff along (3,1)..(3,10). Moves are
 *   deterministic. Entering the cliff costs -100 and teleports to the start without ending
 *   the episode; that step still counts against the horizon. Every other step, including
 *   the one reaching the goal, pays 0. Horizon 200.
 * - FrozenLake: 4x4, start (0,0), goal (3,3), holes at (1,1), (1,3), (2,3), (3,0). The
 *   intended move happens with probability 1/3; otherwise the agent slides to one of the
 *   two perpendicular directions, 1/3 each. Goal pays 1, holes pay 0; both end the
 *   episode. Horizon 10.
 *
 * Moves into a wall leave the position unchanged.
 */
class GridEnv {
 public:
  explicit GridEnv(EnvKind kind);

  /// Puts the agent on the start cell and reseeds the slip generator.
  std::int32_t reset(std::uint64_t seed);

  /// New episode starting on `p` without reseeding, so the slip stream continues.
  /// `p` must be a floor or start cell.
  std::int32_t reset_to(Position p);

  /// Throws `Error(kState)` after the episode is over.
  EnvOutcome step(Action action);

  /// Step with an explicit slip draw `u` in [0, 1): below 1/3 moves as intended,
  /// below 2/3 slides counter-clockwise, otherwise clockwise. Ignored by CliffWalking.
  EnvOutcome step_with_draw(Action action, double u);

  [[nodiscard]] EnvKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::int32_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::int32_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::int32_t num_states() const noexcept { return rows_ * cols_; }
  [[nodiscard]] std::int32_t horizon() const noexcept { return horizon_; }
  [[nodiscard]] Position position() const noexcept { return position_; }
  [[nodiscard]] std::int32_t state() const noexcept { return index(position_); }
  [[nodiscard]] std::int32_t steps_taken() const noexcept { return steps_taken_; }
  [[nodiscard]] bool done() const noexcept { return done_; }
  [[nodiscard]] Cell cell(Position p) const;
  [[nodiscard]] Position start() const noexcept { return start_; }

  [[nodiscard]] std::int32_t index(Position p) const noexcept { return p.row * cols_ + p.col; }
  [[nodiscard]] Position position_of(std::int32_t state) const noexcept { return {state / cols_, state % cols_}; }

  /// Neighbor in a direction, clamped at the walls.
  [[nodiscard]] Position move(Position from, Action action) const noexcept;

 private:
  EnvKind kind_;
  std::int32_t rows_;
  std::int32_t cols_;
  std::int32_t horizon_;
  std::vector<Cell> layout_;
  Position start_;
  Position position_;
  std::int32_t steps_taken_ = 0;
  bool done_ = false;
  std::mt19937_64 rng_;
};

/// Perpendicular directions of an action: counter-clockwise first, then clockwise.
std::pair<Action, Action> perpendicular(Action action) noexcept;

std::string_view to_string(Action action) noexcept;

}  // namespace freshreplay

#endif  // FRESHREPLAY_ENVS_HPP
