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

#include "freshreplay/policy.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "freshreplay/error.hpp"

namespace freshreplay {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'R', 'P', 'S'};
constexpr std::uint32_t kFormatVersion = 1;

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw Error(ErrorCode::kParse, "truncated checkpoint");
  }
  return value;
}

}  // namespace

PolicyState::PolicyState(std::int32_t states, std::int32_t actions)
    : num_states(states),
      num_actions(actions),
      logits(static_cast<std::size_t>(states) * static_cast<std::size_t>(actions), 0.0),
      baseline(static_cast<std::size_t>(states), 0.0) {
  if (states <= 0 || actions <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "policy table dimensions must be positive");
  }
}

std::span<const double> PolicyState::row(std::int32_t state) const {
  return std::span<const double>(logits).subspan(static_cast<std::size_t>(state) * num_actions, num_actions);
}

std::span<double> PolicyState::row(std::int32_t state) {
  return std::span<double>(logits).subspan(static_cast<std::size_t>(state) * num_actions, num_actions);
}

void PolicyState::probs(std::int32_t state, std::span<double> out) const {
  const auto preferences = row(state);
  const double peak = *std::max_element(preferences.begin(), preferences.end());
  double total = 0.0;
  for (std::size_t a = 0; a < preferences.size(); ++a) {
    out[a] = std::exp(preferences[a] - peak);
    total += out[a];
  }
  for (auto& p : out) {
    p /= total;
  }
}

double PolicyState::log_prob(std::int32_t state, std::int32_t action) const {
  const auto preferences = row(state);
  const double peak = *std::max_element(preferences.begin(), preferences.end());
  double total = 0.0;
  for (const double value : preferences) {
    total += std::exp(value - peak);
  }
  return preferences[static_cast<std::size_t>(action)] - peak - std::log(total);
}

void write_checkpoint(const PolicyState& policy, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put(out, kFormatVersion);
  put(out, policy.num_states);
  put(out, policy.num_actions);
  put(out, policy.version);
  for (const double value : policy.logits) {
    put(out, value);
  }
  for (const double value : policy.baseline) {
    put(out, value);
  }
  if (!out) {
    throw Error(ErrorCode::kIo, "failed writing checkpoint");
  }
}

PolicyState read_checkpoint(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error(ErrorCode::kParse, "not a policy checkpoint");
  }
  if (const auto version = get<std::uint32_t>(in); version != kFormatVersion) {
    throw Error(ErrorCode::kParse, "unsupported checkpoint format version " + std::to_string(version));
  }
  const auto states = get<std::int32_t>(in);
  const auto actions = get<std::int32_t>(in);
  if (states <= 0 || actions <= 0 || states > (1 << 24) || actions > (1 << 16)) {
    throw Error(ErrorCode::kParse, "implausible checkpoint dimensions");
  }
  PolicyState policy(states, actions);
  policy.version = get<std::int64_t>(in);
  for (auto& value : policy.logits) {
    value = get<double>(in);
  }
  for (auto& value : policy.baseline) {
    value = get<double>(in);
  }
  return policy;
}

void save_checkpoint(const PolicyState& policy, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot write checkpoint '" + path + "'");
  }
  write_checkpoint(policy, out);
}

PolicyState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open checkpoint '" + path + "'");
  }
  return read_checkpoint(in);
}

}  // namespace freshreplay
