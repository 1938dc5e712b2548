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

#include "freshreplay/envs.hpp"

#include <algorithm>

#include "freshreplay/error.hpp"

namespace freshreplay {

namespace {

constexpr double kCliffPenalty = -100.0;
constexpr std::int32_t kCliffWalkingHorizon = 200;
constexpr std::int32_t kFrozenLakeHorizon = 10;

}  // namespace

std::string_view to_string(Action action) noexcept {
  switch (action) {
    case Action::kUp:
      return "up";
    case Action::kDown:
      return "down";
    case Action::kLeft:
      return "left";
    case Action::kRight:
      return "right";
  }
  return "?";
}

std::pair<Action, Action> perpendicular(Action action) noexcept {
  switch (action) {
    case Action::kUp:
      return {Action::kLeft, Action::kRight};
    case Action::kDown:
      return {Action::kRight, Action::kLeft};
    case Action::kLeft:
      return {Action::kDown, Action::kUp};
    case Action::kRight:
      return {Action::kUp, Action::kDown};
  }
  return {action, action};
}

GridEnv::GridEnv(EnvKind kind) : kind_(kind) {
  if (kind == EnvKind::kCliffWalking) {
    rows_ = 4;
    cols_ = 12;
    horizon_ = kCliffWalkingHorizon;
    layout_.assign(static_cast<std::size_t>(rows_ * cols_), Cell::kFloor);
    start_ = {3, 0};
    layout_[index({3, 0})] = Cell::kStart;
    layout_[index({3, 11})] = Cell::kGoal;
    for (std::int32_t col = 1; col <= 10; ++col) {
      layout_[index({3, col})] = Cell::kCliff;
    }
  } else {
    rows_ = 4;
    cols_ = 4;
    horizon_ = kFrozenLakeHorizon;
    layout_.assign(static_cast<std::size_t>(rows_ * cols_), Cell::kFloor);
    start_ = {0, 0};
    layout_[index({0, 0})] = Cell::kStart;
    layout_[index({3, 3})] = Cell::kGoal;
    for (const Position hole : {Position{1, 1}, Position{1, 3}, Position{2, 3}, Position{3, 0}}) {
      layout_[index(hole)] = Cell::kHole;
    }
  }
  position_ = start_;
}

Cell GridEnv::cell(Position p) const {
  if (p.row < 0 || p.row >= rows_ || p.col < 0 || p.col >= cols_) {
    throw Error(ErrorCode::kOutOfRange, "cell outside the grid");
  }
  return layout_[static_cast<std::size_t>(index(p))];
}

std::int32_t GridEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  position_ = start_;
  steps_taken_ = 0;
  done_ = false;
  return state();
}

std::int32_t GridEnv::reset_to(Position p) {
  const Cell c = cell(p);
  if (c != Cell::kFloor && c != Cell::kStart) {
    throw Error(ErrorCode::kInvalidArgument, "episodes can only start on a floor cell");
  }
  position_ = p;
  steps_taken_ = 0;
  done_ = false;
  return state();
}

Position GridEnv::move(Position from, Action action) const noexcept {
  switch (action) {
    case Action::kUp:
      from.row = std::max(from.row - 1, 0);
      break;
    case Action::kDown:
      from.row = std::min(from.row + 1, rows_ - 1);
      break;
    case Action::kLeft:
      from.col = std::max(from.col - 1, 0);
      break;
    case Action::kRight:
      from.col = std::min(from.col + 1, cols_ - 1);
      break;
  }
  return from;
}

EnvOutcome GridEnv::step(Action action) {
  if (kind_ == EnvKind::kFrozenLake) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    return step_with_draw(action, uniform(rng_));
  }
  return step_with_draw(action, 0.0);
}

EnvOutcome GridEnv::step_with_draw(Action action, double u) {
  if (done_) {
    throw Error(ErrorCode::kState, "step called after the episode finished");
  }
  ++steps_taken_;
  EnvOutcome outcome;

  if (kind_ == EnvKind::kCliffWalking) {
    position_ = move(position_, action);
    const Cell landed = cell(position_);
    if (landed == Cell::kCliff) {
      outcome.reward = kCliffPenalty;
      position_ = start_;
    } else if (landed == Cell::kGoal) {
      done_ = true;
    }
  } else {
    Action actual = action;
    const auto [ccw, cw] = perpendicular(action);
    if (u >= 2.0 / 3.0) {
      actual = cw;
    } else if (u >= 1.0 / 3.0) {
      actual = ccw;
    }
    position_ = move(position_, actual);
    const Cell landed = cell(position_);
    if (landed == Cell::kGoal) {
      outcome.reward = 1.0;
      done_ = true;
    } else if (landed == Cell::kHole) {
      done_ = true;
    }
  }

  if (steps_taken_ >= horizon_) {
    done_ = true;
  }
  outcome.next_state = state();
  outcome.done = done_;
  return outcome;
}

}  // namespace freshreplay
