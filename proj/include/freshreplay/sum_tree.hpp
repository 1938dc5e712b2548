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

#ifndef FRESHREPLAY_SUM_TREE_HPP
#define FRESHREPLAY_SUM_TREE_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace freshreplay {

/**
 * Minimum segment tree with argmin. Unset slots hold +infinity. Ties resolve to the
 * lowest slot index.
 *
 * Not synchronized: one writer at a time, readers only while no writer is active.
 */
class MinTree {
 public:
  explicit MinTree(std::size_t capacity);

  void set(std::size_t index, double value);
  void clear(std::size_t index) { set(index, std::numeric_limits<double>::infinity()); }

  /// Overwrites every slot; `values.size()` must equal `capacity()`.
  void assign(std::span<const double> values);

  [[nodiscard]] bool empty() const noexcept { return !(values_[1] < std::numeric_limits<double>::infinity()); }
  [[nodiscard]] double min() const noexcept { return values_[1]; }
  [[nodiscard]] std::size_t argmin() const noexcept { return indices_[1]; }
  [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }

 private:
  void pull(std::size_t node) noexcept;

  std::size_t capacity_;
  std::size_t base_;
  std::vector<double> values_;
  std::vector<std::size_t> indices_;
};

/**
 * Sum segment tree over non-negative leaf weights, for proportional sampling in
 * O(log N). Also tracks the minimum over positive leaves, which is what the
 * importance-weight normalization needs.
 *
 * Every update recomputes ancestors from their children rather than applying deltas,
 * so internal nodes are always exact sums of the current leaves.
 *
 * Not synchronized: one writer at a time, readers only while no writer is active.
 */
class SumTree {
 public:
  explicit SumTree(std::size_t capacity);

  /// Throws `Error(kOutOfRange)` for a bad index, `Error(kInvalidArgument)` for negative or non-finite values.
  void set_leaf(std::size_t index, double value);

  /// Overwrites every leaf and rebuilds all internal nodes in O(N).
  void assign(std::span<const double> values);

  /// Recomputes the whole tree from the leaves.
  void rebuild();

  /// Smallest index whose inclusive prefix sum exceeds `x`. Zero leaves are never returned.
  [[nodiscard]] std::size_t prefix_find(double x) const;

  [[nodiscard]] double total() const noexcept { return nodes_[1]; }

  /// Minimum over positive leaves. Throws `Error(kEmpty)` when there are none.
  [[nodiscard]] double min_transformed() const;

  [[nodiscard]] double leaf(std::size_t index) const;
  [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
  [[nodiscard]] bool empty() const noexcept { return min_.empty(); }

 private:
  std::size_t capacity_;
  std::size_t base_;
  std::vector<double> nodes_;
  MinTree min_;
};

}  // namespace freshreplay

#endif  // FRESHREPLAY_SUM_TREE_HPP
