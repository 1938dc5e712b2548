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

#include "freshreplay/sum_tree.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "freshreplay/error.hpp"

namespace freshreplay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t leaf_base(std::size_t capacity) {
  if (capacity == 0) {
    throw Error(ErrorCode::kInvalidArgument, "tree capacity must be positive");
  }
  return std::bit_ceil(capacity);
}

void check_index(std::size_t index, std::size_t capacity) {
  if (index >= capacity) {
    throw Error(ErrorCode::kOutOfRange,
                "slot " + std::to_string(index) + " out of range for capacity " + std::to_string(capacity));
  }
}

}  // namespace

MinTree::MinTree(std::size_t capacity)
    : capacity_(capacity), base_(leaf_base(capacity)), values_(2 * base_, kInf), indices_(2 * base_, 0) {
  for (std::size_t i = 0; i < base_; ++i) {
    indices_[base_ + i] = i;
  }
  for (std::size_t node = base_ - 1; node >= 1; --node) {
    pull(node);
  }
}

void MinTree::pull(std::size_t node) noexcept {
  const auto left = 2 * node;
  const auto right = left + 1;
  // `<=` keeps the lower index on ties.
  const auto pick = values_[left] <= values_[right] ? left : right;
  values_[node] = values_[pick];
  indices_[node] = indices_[pick];
}

void MinTree::set(std::size_t index, double value) {
  check_index(index, capacity_);
  auto node = base_ + index;
  values_[node] = value;
  for (node /= 2; node >= 1; node /= 2) {
    pull(node);
  }
}

void MinTree::assign(std::span<const double> values) {
  if (values.size() != capacity_) {
    throw Error(ErrorCode::kInvalidArgument, "assign size does not match capacity");
  }
  for (std::size_t i = 0; i < capacity_; ++i) {
    values_[base_ + i] = values[i];
  }
  for (std::size_t node = base_ - 1; node >= 1; --node) {
    pull(node);
  }
}

SumTree::SumTree(std::size_t capacity)
    : capacity_(capacity), base_(leaf_base(capacity)), nodes_(2 * base_, 0.0), min_(capacity) {}

void SumTree::set_leaf(std::size_t index, double value) {
  check_index(index, capacity_);
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidArgument, "leaf value must be finite and non-negative");
  }
  auto node = base_ + index;
  nodes_[node] = value;
  for (node /= 2; node >= 1; node /= 2) {
    nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
  }
  if (value > 0.0) {
    min_.set(index, value);
  } else {
    min_.clear(index);
  }
}

void SumTree::assign(std::span<const double> values) {
  if (values.size() != capacity_) {
    throw Error(ErrorCode::kInvalidArgument, "assign size does not match capacity");
  }
  for (std::size_t i = 0; i < capacity_; ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw Error(ErrorCode::kInvalidArgument, "leaf value must be finite and non-negative");
    }
    nodes_[base_ + i] = values[i];
  }
  rebuild();
}

void SumTree::rebuild() {
  for (std::size_t node = base_ - 1; node >= 1; --node) {
    nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
  }
  std::vector<double> positive(capacity_);
  for (std::size_t i = 0; i < capacity_; ++i) {
    const double value = nodes_[base_ + i];
    positive[i] = value > 0.0 ? value : kInf;
  }
  min_.assign(positive);
}

std::size_t SumTree::prefix_find(double x) const {
  if (!(total() > 0.0)) {
    throw Error(ErrorCode::kEmpty, "prefix_find on a tree with zero total");
  }
  if (!(x >= 0.0 && x < total())) {
    throw Error(ErrorCode::kOutOfRange, "prefix_find argument outside [0, total)");
  }
  std::size_t node = 1;
  while (node < base_) {
    const double left = nodes_[2 * node];
    const double right = nodes_[2 * node + 1];
    // Rounding in `x -= left` can leave x at or past the right sum; never descend into
    // an empty subtree because of it.
    if (x < left || !(right > 0.0)) {
      node = 2 * node;
    } else {
      x -= left;
      node = 2 * node + 1;
    }
  }
  return node - base_;
}

double SumTree::min_transformed() const {
  if (min_.empty()) {
    throw Error(ErrorCode::kEmpty, "min_transformed on a tree without positive leaves");
  }
  return min_.min();
}

double SumTree::leaf(std::size_t index) const {
  check_index(index, capacity_);
  return nodes_[base_ + index];
}

}  // namespace freshreplay
