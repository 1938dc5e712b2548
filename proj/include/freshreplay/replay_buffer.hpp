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

#ifndef FRESHREPLAY_REPLAY_BUFFER_HPP
#define FRESHREPLAY_REPLAY_BUFFER_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <iosfwd>
#include <memory>
#include <random>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "freshreplay/config.hpp"
#include "freshreplay/sum_tree.hpp"
#include "freshreplay/types.hpp"

namespace freshreplay {

struct BufferOptions {
  /// `tau` here is the decay actually applied (use `RunConfig::effective_tau()`).
  PriorityConfig priority;
  std::size_t capacity = 50000;
  EvictionPolicy eviction = EvictionPolicy::kLowestEffectivePriority;
  std::uint64_t seed = 0;
  /// Worker threads used by the refresh scan; at least one.
  unsigned refresh_threads = 1;

  static BufferOptions from(const RunConfig& config);
};

/// Read-only view of one stored entry.
struct EntryView {
  TrajectoryId trajectory_id = 0;
  std::size_t slot = 0;
  std::int64_t collection_step = 0;
  double base_priority = 0.0;
  double effective_priority = 0.0;
  /// Tree leaf, effective_priority^alpha.
  double transformed = 0.0;
  PrioritySignal signal;
};

struct BatchItem {
  TrajectoryId trajectory_id = 0;
  std::size_t slot = 0;
  std::shared_ptr<const Trajectory> trajectory;
  std::int64_t collection_step = 0;
  double effective_priority = 0.0;
  /// P(i) = p_i^alpha / sum_k p_k^alpha at sampling time.
  double probability = 0.0;
  /// (1 / (N P(i)))^beta normalized by the largest weight over the whole buffer.
  double is_weight = 0.0;
  /// Prefix-sum position that selected this item.
  double draw = 0.0;
};

struct PrioritizedBatch {
  std::vector<BatchItem> items;
  std::size_t buffer_size_at_sample = 0;
  double total_priority = 0.0;
};

struct RefreshReport {
  std::size_t entries_scanned = 0;
  double wall_time_seconds = 0.0;
};

/**
 * Trajectory-level prioritized replay buffer.
 *
 * Sampling probabilities are proportional to `effective_priority^alpha`, where the
 * effective priority is the base priority decayed by the entry's age. Ages only change
 * when `refresh_priorities` runs, which recomputes every entry against the current
 * step and rebuilds the sum tree.
 *
 * Threading: one writer (insert, update, refresh commit) at a time. A refresh can be
 * started with `refresh_async` while the caller trains; it computes new priorities into
 * staging storage and swaps them in under an exclusive lock, so a concurrent
 * `sample_stratified` sees either the old or the new priorities, never a mix. No insert
 * or update may be issued while an asynchronous refresh is pending.
 */
class ReplayBuffer {
 public:
  explicit ReplayBuffer(BufferOptions options);

  ReplayBuffer(const ReplayBuffer&) = delete;
  ReplayBuffer& operator=(const ReplayBuffer&) = delete;

  /// Stores a trajectory, evicting one entry first when full. Returns the slot used.
  std::size_t insert(Trajectory trajectory, const PrioritySignal& signal, std::int64_t current_step);

  /// Draws one item from each of `batch_size` equal segments of the total priority mass.
  PrioritizedBatch sample_stratified(std::size_t batch_size, double beta);
  PrioritizedBatch sample_stratified(std::size_t batch_size, double beta, std::mt19937_64& rng) const;

  /// Recomputes all effective priorities at `current_step` and rebuilds the tree.
  RefreshReport refresh_priorities(std::int64_t current_step);

  /// Same work as `refresh_priorities`, run on a background thread.
  std::future<RefreshReport> refresh_async(std::int64_t current_step);

  /// Replaces the base priority signal of one entry. Reward-magnitude bases are frozen.
  void update_base_priority(TrajectoryId id, const PrioritySignal& signal);

  /// Recomputes every signal with `signal_of` and re-derives all priorities at `current_step`.
  using SignalFn = std::function<PrioritySignal(const Trajectory&, const PrioritySignal&)>;
  void recompute_base_priorities(const SignalFn& signal_of, std::int64_t current_step);

  [[nodiscard]] std::size_t size() const;
  [[nodiscard]] std::size_t capacity() const noexcept { return options_.capacity; }
  [[nodiscard]] const BufferOptions& options() const noexcept { return options_; }
  [[nodiscard]] std::int64_t current_step() const;

  /// Id given to the most recent insertion; 0 before the first.
  [[nodiscard]] TrajectoryId last_inserted_id() const;
  [[nodiscard]] bool contains(TrajectoryId id) const;
  [[nodiscard]] EntryView entry(TrajectoryId id) const;
  [[nodiscard]] std::shared_ptr<const Trajectory> trajectory(TrajectoryId id) const;

  /// All live entries ordered by trajectory id.
  [[nodiscard]] std::vector<EntryView> entries() const;

  /// Line-oriented text dump, see `write_snapshot`.
  [[nodiscard]] std::string snapshot() const;

  /**
   * Writes `# freshreplay-buffer-snapshot v1`, a column header comment, then one line per
   * live entry ordered by id: `trajectory_id collection_step base_priority effective_priority`,
   * reals in shortest round-trip form.
   */
  void write_snapshot(std::ostream& out) const;

 private:
  struct Staged {
    std::vector<double> effective;
    std::vector<double> transformed;
    std::vector<double> eviction_keys;
  };

  std::size_t evict_locked();
  void set_slot_priority_locked(std::size_t slot, double effective);
  [[nodiscard]] double transform(double effective) const;
  Staged stage_refresh(std::int64_t current_step) const;
  void commit_locked(Staged staged);
  void check_age(std::int64_t collection_step, std::int64_t current_step) const;
  [[nodiscard]] EntryView view_locked(std::size_t slot) const;

  BufferOptions options_;
  mutable std::shared_mutex mutex_;
  std::mt19937_64 rng_;

  SumTree tree_;
  MinTree eviction_index_;
  std::vector<TrajectoryId> ids_;  // 0 marks an empty slot
  std::vector<std::shared_ptr<const Trajectory>> trajectories_;
  std::vector<PrioritySignal> signals_;
  std::vector<double> base_;
  std::vector<double> effective_;
  std::vector<std::int64_t> collection_step_;
  std::unordered_map<TrajectoryId, std::size_t> slot_of_;
  std::vector<std::size_t> free_slots_;
  std::deque<std::size_t> insertion_order_;
  TrajectoryId next_id_ = 1;
  std::int64_t current_step_ = 0;
};

/// Parses `FRESHREPLAY_THREADS`; 1 when unset or malformed.
unsigned refresh_threads_from_env();

}  // namespace freshreplay

#endif  // FRESHREPLAY_REPLAY_BUFFER_HPP
