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

#include "freshreplay/replay_buffer.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "freshreplay/error.hpp"
#include "freshreplay/priority.hpp"

namespace freshreplay {

namespace {

constexpr double kEmptyKey = std::numeric_limits<double>::infinity();

std::string format_real(double value) {
  std::array<char, 32> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return {buffer.data(), ptr};
}

}  // namespace

unsigned refresh_threads_from_env() {
  const char* text = std::getenv("FRESHREPLAY_THREADS");
  if (text == nullptr) {
    return 1;
  }
  char* end = nullptr;
  const long value = std::strtol(text, &end, 10);
  if (end == text || *end != '\0' || value < 1) {
    return 1;
  }
  return static_cast<unsigned>(std::min<long>(value, 256));
}

BufferOptions BufferOptions::from(const RunConfig& config) {
  BufferOptions options;
  options.priority = config.priority;
  options.priority.tau = config.effective_tau();
  options.capacity = static_cast<std::size_t>(config.buffer_capacity);
  options.eviction = config.eviction_policy;
  options.seed = config.seed;
  options.refresh_threads = refresh_threads_from_env();
  return options;
}

ReplayBuffer::ReplayBuffer(BufferOptions options)
    : options_(std::move(options)),
      rng_(options_.seed),
      tree_(options_.capacity),
      eviction_index_(options_.capacity),
      ids_(options_.capacity, 0),
      trajectories_(options_.capacity),
      signals_(options_.capacity),
      base_(options_.capacity, 0.0),
      effective_(options_.capacity, 0.0),
      collection_step_(options_.capacity, 0) {
  if (const auto errors = validate(options_.priority); !errors.empty()) {
    throw Error(ErrorCode::kValidation, "invalid priority config: " + errors.front());
  }
  options_.refresh_threads = std::max(1U, options_.refresh_threads);
  free_slots_.reserve(options_.capacity);
  for (std::size_t slot = options_.capacity; slot-- > 0;) {
    free_slots_.push_back(slot);
  }
}

double ReplayBuffer::transform(double effective) const { return std::pow(effective, options_.priority.alpha); }

void ReplayBuffer::check_age(std::int64_t collection_step, std::int64_t current_step) const {
  if (current_step < collection_step) {
    throw Error(ErrorCode::kInvalidArgument, "current step " + std::to_string(current_step) +
                                                 " precedes collection step " + std::to_string(collection_step));
  }
}

void ReplayBuffer::set_slot_priority_locked(std::size_t slot, double effective) {
  effective_[slot] = effective;
  tree_.set_leaf(slot, transform(effective));
  eviction_index_.set(slot, effective);
}

std::size_t ReplayBuffer::evict_locked() {
  std::size_t slot = 0;
  if (options_.eviction == EvictionPolicy::kFifo) {
    slot = insertion_order_.front();
    insertion_order_.pop_front();
  } else {
    slot = eviction_index_.argmin();
  }
  slot_of_.erase(ids_[slot]);
  ids_[slot] = 0;
  trajectories_[slot].reset();
  base_[slot] = 0.0;
  effective_[slot] = 0.0;
  tree_.set_leaf(slot, 0.0);
  eviction_index_.clear(slot);
  return slot;
}

std::size_t ReplayBuffer::insert(Trajectory trajectory, const PrioritySignal& signal, std::int64_t current_step) {
  validate_trajectory(trajectory);
  check_age(trajectory.collection_step, current_step);
  const double base = base_priority(signal, options_.priority);
  const auto age = static_cast<double>(current_step - trajectory.collection_step);
  const double effective = effective_priority(base, age, options_.priority);

  std::unique_lock lock(mutex_);
  std::size_t slot = 0;
  if (free_slots_.empty()) {
    slot = evict_locked();
  } else {
    slot = free_slots_.back();
    free_slots_.pop_back();
  }
  const TrajectoryId id = next_id_++;
  trajectory.trajectory_id = id;
  ids_[slot] = id;
  collection_step_[slot] = trajectory.collection_step;
  trajectories_[slot] = std::make_shared<const Trajectory>(std::move(trajectory));
  signals_[slot] = signal;
  base_[slot] = base;
  set_slot_priority_locked(slot, effective);
  slot_of_.emplace(id, slot);
  if (options_.eviction == EvictionPolicy::kFifo) {
    insertion_order_.push_back(slot);
  }
  current_step_ = std::max(current_step_, current_step);
  return slot;
}

PrioritizedBatch ReplayBuffer::sample_stratified(std::size_t batch_size, double beta) {
  return sample_stratified(batch_size, beta, rng_);
}

PrioritizedBatch ReplayBuffer::sample_stratified(std::size_t batch_size, double beta, std::mt19937_64& rng) const {
  if (batch_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch size must be positive");
  }
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beta must lie in [0, 1]");
  }
  std::shared_lock lock(mutex_);
  const std::size_t size = slot_of_.size();
  if (size == 0) {
    throw Error(ErrorCode::kEmpty, "cannot sample from an empty buffer");
  }
  const double total = tree_.total();
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kEmpty, "total priority is zero");
  }
  const double min_leaf = tree_.min_transformed();
  const double segment = total / static_cast<double>(batch_size);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  PrioritizedBatch batch;
  batch.buffer_size_at_sample = size;
  batch.total_priority = total;
  batch.items.reserve(batch_size);
  for (std::size_t k = 0; k < batch_size; ++k) {
    const double low = segment * static_cast<double>(k);
    double x = low + segment * uniform(rng);
    x = std::min(x, std::nextafter(total, 0.0));
    const std::size_t slot = tree_.prefix_find(x);
    const double leaf = tree_.leaf(slot);

    BatchItem item;
    item.trajectory_id = ids_[slot];
    item.slot = slot;
    item.trajectory = trajectories_[slot];
    item.collection_step = collection_step_[slot];
    item.effective_priority = effective_[slot];
    item.probability = leaf / total;
    // (N P(i))^-beta / (N P_min)^-beta; N and the total cancel.
    item.is_weight = std::pow(min_leaf / leaf, beta);
    item.draw = x;
    batch.items.push_back(std::move(item));
  }
  return batch;
}

ReplayBuffer::Staged ReplayBuffer::stage_refresh(std::int64_t current_step) const {
  const std::size_t capacity = options_.capacity;
  Staged staged{std::vector<double>(capacity, 0.0), std::vector<double>(capacity, 0.0),
                std::vector<double>(capacity, kEmptyKey)};
  for (std::size_t slot = 0; slot < capacity; ++slot) {
    if (ids_[slot] != 0) {
      check_age(collection_step_[slot], current_step);
    }
  }
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t slot = begin; slot < end; ++slot) {
      if (ids_[slot] == 0) {
        continue;
      }
      const double effective =
          effective_priority(base_[slot], static_cast<double>(current_step - collection_step_[slot]),
                             options_.priority);
      staged.effective[slot] = effective;
      staged.transformed[slot] = transform(effective);
      staged.eviction_keys[slot] = effective;
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(options_.refresh_threads, std::max<std::size_t>(1, capacity / 4096));
  if (threads <= 1) {
    work(0, capacity);
    return staged;
  }
  std::vector<std::thread> workers;
  const std::size_t chunk = (capacity + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(capacity, begin + chunk);
    workers.emplace_back(work, begin, end);
  }
  for (auto& worker : workers) {
    worker.join();
  }
  return staged;
}

void ReplayBuffer::commit_locked(Staged staged) {
  effective_ = std::move(staged.effective);
  tree_.assign(staged.transformed);
  eviction_index_.assign(staged.eviction_keys);
}

RefreshReport ReplayBuffer::refresh_priorities(std::int64_t current_step) {
  const auto start = std::chrono::steady_clock::now();
  RefreshReport report;
  {
    std::shared_lock read_lock(mutex_);
    auto staged = stage_refresh(current_step);
    read_lock.unlock();
    std::unique_lock write_lock(mutex_);
    commit_locked(std::move(staged));
    current_step_ = std::max(current_step_, current_step);
    report.entries_scanned = slot_of_.size();
  }
  report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::future<RefreshReport> ReplayBuffer::refresh_async(std::int64_t current_step) {
  return std::async(std::launch::async, [this, current_step] { return refresh_priorities(current_step); });
}

void ReplayBuffer::update_base_priority(TrajectoryId id, const PrioritySignal& signal) {
  if (options_.priority.base_kind == BaseKind::kRewardMagnitude) {
    throw Error(ErrorCode::kFrozenBase, "base priority frozen in reward mode");
  }
  const double base = base_priority(signal, options_.priority);
  std::unique_lock lock(mutex_);
  const auto found = slot_of_.find(id);
  if (found == slot_of_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown trajectory id " + std::to_string(id));
  }
  const std::size_t slot = found->second;
  signals_[slot] = signal;
  base_[slot] = base;
  const auto age = static_cast<double>(current_step_ - collection_step_[slot]);
  set_slot_priority_locked(slot, effective_priority(base, age, options_.priority));
}

void ReplayBuffer::recompute_base_priorities(const SignalFn& signal_of, std::int64_t current_step) {
  if (options_.priority.base_kind == BaseKind::kRewardMagnitude) {
    throw Error(ErrorCode::kFrozenBase, "base priority frozen in reward mode");
  }
  std::unique_lock lock(mutex_);
  for (std::size_t slot = 0; slot < options_.capacity; ++slot) {
    if (ids_[slot] == 0) {
      continue;
    }
    auto signal = signal_of(*trajectories_[slot], signals_[slot]);
    base_[slot] = base_priority(signal, options_.priority);
    signals_[slot] = std::move(signal);
  }
  auto staged = stage_refresh(current_step);
  commit_locked(std::move(staged));
  current_step_ = std::max(current_step_, current_step);
}

std::size_t ReplayBuffer::size() const {
  std::shared_lock lock(mutex_);
  return slot_of_.size();
}

std::int64_t ReplayBuffer::current_step() const {
  std::shared_lock lock(mutex_);
  return current_step_;
}

TrajectoryId ReplayBuffer::last_inserted_id() const {
  std::shared_lock lock(mutex_);
  return next_id_ - 1;
}

bool ReplayBuffer::contains(TrajectoryId id) const {
  std::shared_lock lock(mutex_);
  return slot_of_.contains(id);
}

EntryView ReplayBuffer::view_locked(std::size_t slot) const {
  EntryView view;
  view.trajectory_id = ids_[slot];
  view.slot = slot;
  view.collection_step = collection_step_[slot];
  view.base_priority = base_[slot];
  view.effective_priority = effective_[slot];
  view.transformed = tree_.leaf(slot);
  view.signal = signals_[slot];
  return view;
}

EntryView ReplayBuffer::entry(TrajectoryId id) const {
  std::shared_lock lock(mutex_);
  const auto found = slot_of_.find(id);
  if (found == slot_of_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown trajectory id " + std::to_string(id));
  }
  return view_locked(found->second);
}

std::shared_ptr<const Trajectory> ReplayBuffer::trajectory(TrajectoryId id) const {
  std::shared_lock lock(mutex_);
  const auto found = slot_of_.find(id);
  if (found == slot_of_.end()) {
    throw Error(ErrorCode::kNotFound, "unknown trajectory id " + std::to_string(id));
  }
  return trajectories_[found->second];
}

std::vector<EntryView> ReplayBuffer::entries() const {
  std::shared_lock lock(mutex_);
  std::vector<EntryView> views;
  views.reserve(slot_of_.size());
  for (std::size_t slot = 0; slot < options_.capacity; ++slot) {
    if (ids_[slot] != 0) {
      views.push_back(view_locked(slot));
    }
  }
  std::sort(views.begin(), views.end(),
            [](const EntryView& a, const EntryView& b) { return a.trajectory_id < b.trajectory_id; });
  return views;
}

void ReplayBuffer::write_snapshot(std::ostream& out) const {
  out << "# freshreplay-buffer-snapshot v1\n"
      << "# trajectory_id collection_step base_priority effective_priority\n";
  for (const auto& view : entries()) {
    out << view.trajectory_id << ' ' << view.collection_step << ' ' << format_real(view.base_priority) << ' '
        << format_real(view.effective_priority) << '\n';
  }
}

std::string ReplayBuffer::snapshot() const {
  std::ostringstream out;
  write_snapshot(out);
  return out.str();
}

}  // namespace freshreplay
