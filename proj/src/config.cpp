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

#include "freshreplay/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "freshreplay/error.hpp"

namespace freshreplay {

std::string_view to_string(BaseKind kind) noexcept {
  switch (kind) {
    case BaseKind::kRewardMagnitude:
      return "reward_magnitude";
    case BaseKind::kAdvantageMagnitude:
      return "advantage_magnitude";
    case BaseKind::kTdErrorMagnitude:
      return "td_error_magnitude";
  }
  return "?";
}

std::string_view to_string(EvictionPolicy policy) noexcept {
  switch (policy) {
    case EvictionPolicy::kLowestEffectivePriority:
      return "lowest_effective_priority";
    case EvictionPolicy::kFifo:
      return "fifo";
  }
  return "?";
}

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::kOnPolicy:
      return "on_policy";
    case Method::kStandardPer:
      return "standard_per";
    case Method::kFreshPer:
      return "fresh_per";
  }
  return "?";
}

std::string_view to_string(EnvKind env) noexcept {
  switch (env) {
    case EnvKind::kCliffWalking:
      return "cliffwalking";
    case EnvKind::kFrozenLake:
      return "frozenlake";
  }
  return "?";
}

std::vector<std::string> validate(const PriorityConfig& config) {
  std::vector<std::string> errors;
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    errors.emplace_back("priority.alpha must lie in [0, 1]");
  }
  if (!(config.beta_start >= 0.0 && config.beta_start <= 1.0)) {
    errors.emplace_back("priority.beta_start must lie in [0, 1]");
  }
  if (!(config.beta_end >= 0.0 && config.beta_end <= 1.0)) {
    errors.emplace_back("priority.beta_end must lie in [0, 1]");
  }
  if (!(config.beta_start <= config.beta_end)) {
    errors.emplace_back("priority.beta_start must not exceed priority.beta_end");
  }
  if (config.beta_anneal_steps < 0) {
    errors.emplace_back("priority.beta_anneal_steps must be non-negative");
  }
  if (!(config.tau > 0.0)) {
    errors.emplace_back("tau must be positive");
  }
  if (!(config.epsilon > 0.0) || !std::isfinite(config.epsilon)) {
    errors.emplace_back("priority.epsilon must be positive and finite");
  }
  return errors;
}

std::vector<std::string> validate(const RunConfig& config) {
  auto errors = validate(config.priority);
  auto positive_int = [&](std::int64_t value, const char* name) {
    if (value <= 0) {
      errors.emplace_back(std::string(name) + " must be positive");
    }
  };
  auto positive_real = [&](double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      errors.emplace_back(std::string(name) + " must be positive and finite");
    }
  };
  positive_int(config.buffer_capacity, "buffer.capacity");
  positive_int(config.batch_size_b, "trainer.batch_size");
  positive_int(config.rollout_batch, "trainer.rollout_batch");
  positive_int(config.max_iterations, "trainer.max_iterations");
  if (config.replay_ratio_k < 0) {
    errors.emplace_back("trainer.replay_ratio must be non-negative");
  }
  if (config.batch_size_b > config.buffer_capacity) {
    errors.emplace_back("trainer.batch_size must not exceed buffer.capacity");
  }
  positive_real(config.clip_epsilon, "trainer.clip_epsilon");
  positive_real(config.advantage_clip, "trainer.advantage_clip");
  positive_real(config.learning_rate, "trainer.learning_rate");
  positive_real(config.baseline_learning_rate, "trainer.baseline_learning_rate");
  return errors;
}

void ensure_valid(const RunConfig& config) {
  const auto errors = validate(config);
  if (errors.empty()) {
    return;
  }
  std::string message = "invalid config:";
  for (const auto& error : errors) {
    message += "\n  - " + error;
  }
  throw Error(ErrorCode::kValidation, message);
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw Error(ErrorCode::kParse, "bad value '" + std::string(value) + "' for " + std::string(key) +
                                     " (expected " + std::string(expected) + ")");
}

double parse_real(std::string_view key, std::string_view text) {
  const std::string buffer(text);
  char* end = nullptr;
  const double value = std::strtod(buffer.c_str(), &end);
  if (buffer.empty() || end != buffer.c_str() + buffer.size()) {
    bad_value(key, text, "a real number");
  }
  return value;
}

template <class Int>
Int parse_int(std::string_view key, std::string_view text) {
  Int value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    bad_value(key, text, "an integer");
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") {
    return true;
  }
  if (text == "false" || text == "0") {
    return false;
  }
  bad_value(key, text, "true or false");
}

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view key, std::string_view text, const std::array<Enum, N>& options) {
  for (const auto option : options) {
    if (to_string(option) == text) {
      return option;
    }
  }
  std::string expected;
  for (const auto option : options) {
    expected += (expected.empty() ? "" : " | ") + std::string(to_string(option));
  }
  bad_value(key, text, expected);
}

std::string format_real(double value) {
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  std::array<char, 32> buffer{};
  const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return {buffer.data(), ptr};
}

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

template <class Enum, std::size_t N>
Field enum_field(const char* key, Enum RunConfig::*member, std::array<Enum, N> options) {
  return {key, [member](const RunConfig& c) { return std::string(to_string(c.*member)); },
          [key, member, options](RunConfig& c, std::string_view v) { c.*member = parse_enum(key, v, options); }};
}

Field real_field(const char* key, double PriorityConfig::*member) {
  return {key, [member](const RunConfig& c) { return format_real(c.priority.*member); },
          [key, member](RunConfig& c, std::string_view v) { c.priority.*member = parse_real(key, v); }};
}

Field real_field(const char* key, double RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return format_real(c.*member); },
          [key, member](RunConfig& c, std::string_view v) { c.*member = parse_real(key, v); }};
}

Field int_field(const char* key, std::int64_t RunConfig::*member) {
  return {key, [member](const RunConfig& c) { return std::to_string(c.*member); },
          [key, member](RunConfig& c, std::string_view v) { c.*member = parse_int<std::int64_t>(key, v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      enum_field("method", &RunConfig::method,
                 std::array{Method::kOnPolicy, Method::kStandardPer, Method::kFreshPer}),
      enum_field("env", &RunConfig::env, std::array{EnvKind::kCliffWalking, EnvKind::kFrozenLake}),
      {"seed", [](const RunConfig& c) { return std::to_string(c.seed); },
       [](RunConfig& c, std::string_view v) { c.seed = parse_int<std::uint64_t>("seed", v); }},
      real_field("priority.alpha", &PriorityConfig::alpha),
      real_field("priority.beta_start", &PriorityConfig::beta_start),
      real_field("priority.beta_end", &PriorityConfig::beta_end),
      {"priority.beta_anneal_steps", [](const RunConfig& c) { return std::to_string(c.priority.beta_anneal_steps); },
       [](RunConfig& c, std::string_view v) {
         c.priority.beta_anneal_steps = parse_int<std::int64_t>("priority.beta_anneal_steps", v);
       }},
      real_field("priority.tau", &PriorityConfig::tau),
      real_field("priority.epsilon", &PriorityConfig::epsilon),
      {"priority.base_kind", [](const RunConfig& c) { return std::string(to_string(c.priority.base_kind)); },
       [](RunConfig& c, std::string_view v) {
         c.priority.base_kind =
             parse_enum("priority.base_kind", v,
                        std::array{BaseKind::kRewardMagnitude, BaseKind::kAdvantageMagnitude,
                                   BaseKind::kTdErrorMagnitude});
       }},
      int_field("buffer.capacity", &RunConfig::buffer_capacity),
      enum_field("buffer.eviction", &RunConfig::eviction_policy,
                 std::array{EvictionPolicy::kLowestEffectivePriority, EvictionPolicy::kFifo}),
      int_field("trainer.replay_ratio", &RunConfig::replay_ratio_k),
      int_field("trainer.batch_size", &RunConfig::batch_size_b),
      int_field("trainer.rollout_batch", &RunConfig::rollout_batch),
      real_field("trainer.clip_epsilon", &RunConfig::clip_epsilon),
      real_field("trainer.advantage_clip", &RunConfig::advantage_clip),
      real_field("trainer.learning_rate", &RunConfig::learning_rate),
      real_field("trainer.baseline_learning_rate", &RunConfig::baseline_learning_rate),
      int_field("trainer.max_iterations", &RunConfig::max_iterations),
      {"trainer.sync_refresh", [](const RunConfig& c) { return std::string(c.sync_refresh ? "true" : "false"); },
       [](RunConfig& c, std::string_view v) { c.sync_refresh = parse_bool("trainer.sync_refresh", v); }},
  };
  return table;
}

const Field& find_field(std::string_view key) {
  for (const auto& field : fields()) {
    if (key == field.key) {
      return field;
    }
  }
  throw Error(ErrorCode::kParse, "unknown config key '" + std::string(key) + "'");
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& field : fields()) {
    keys.emplace_back(field.key);
  }
  return keys;
}

void set_field(RunConfig& config, std::string_view key, std::string_view value) {
  find_field(key).set(config, trim(value));
}

std::string get_field(const RunConfig& config, std::string_view key) { return find_field(key).get(config); }

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& field : fields()) {
    out += field.key;
    out += " = ";
    out += field.get(config);
    out += '\n';
  }
  return out;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_number = 0;
  while (!text.empty()) {
    ++line_number;
    const auto newline = text.find('\n');
    auto line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto where = "line " + std::to_string(line_number) + ": ";
    const auto equals = line.find('=');
    if (equals == std::string_view::npos) {
      throw Error(ErrorCode::kParse, where + "expected 'key = value'");
    }
    const auto key = trim(line.substr(0, equals));
    const auto value = trim(line.substr(equals + 1));
    if (!seen.emplace(key).second) {
      throw Error(ErrorCode::kParse, where + "duplicate key '" + std::string(key) + "'");
    }
    try {
      set_field(config, key, value);
    } catch (const Error& error) {
      throw Error(ErrorCode::kParse, where + error.what());
    }
  }
  return config;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open config file '" + path + "'");
  }
  std::ostringstream contents;
  contents << in.rdbuf();
  try {
    return parse_config(contents.str());
  } catch (const Error& error) {
    throw Error(error.code(), path + ": " + error.what());
  }
}

}  // namespace freshreplay
