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

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "freshreplay/error.hpp"
#include "freshreplay/priority.hpp"

namespace freshreplay {
namespace {

PriorityConfig with_tau(double tau) {
  PriorityConfig c;
  c.tau = tau;
  return c;
}

TEST(BasePriority, ReadsTheConfiguredSignal) {
  PriorityConfig c;
  EXPECT_DOUBLE_EQ(base_priority({-1.0, {}, {}}, c), 1.01);
  EXPECT_DOUBLE_EQ(base_priority({0.0, {}, {}}, c), 0.01);
  c.base_kind = BaseKind::kTdErrorMagnitude;
  EXPECT_DOUBLE_EQ(base_priority({0.0, {}, 2.5}, c), 2.51);
  c.base_kind = BaseKind::kAdvantageMagnitude;
  EXPECT_DOUBLE_EQ(base_priority({9.0, -0.5, {}}, c), 0.51);
}

TEST(BasePriority, MissingOrNonFiniteSignalIsRejected) {
  PriorityConfig c;
  c.base_kind = BaseKind::kAdvantageMagnitude;
  EXPECT_THROW(base_priority({1.0, {}, 3.0}, c), Error);
  c.base_kind = BaseKind::kTdErrorMagnitude;
  EXPECT_THROW(base_priority({1.0, 2.0, {}}, c), Error);
  c.base_kind = BaseKind::kRewardMagnitude;
  EXPECT_THROW(base_priority({std::nan(""), {}, {}}, c), Error);
}

TEST(AgeDecay, Examples) {
  EXPECT_EQ(age_decay(0, 500.0), 1.0);
  EXPECT_NEAR(age_decay(500, 500.0), 0.367879, 1e-6);
  EXPECT_NEAR(age_decay(500.0 * std::numbers::ln2, 500.0), 0.5, 1e-6);
  EXPECT_EQ(age_decay(123456, std::numeric_limits<double>::infinity()), 1.0);
  EXPECT_THROW(age_decay(-1, 500.0), Error);
}

TEST(AgeDecay, StrictlyDecreasingForFiniteTau) {
  double previous = age_decay(0, 50.0);
  for (int age = 1; age < 2000; ++age) {
    const double d = age_decay(age, 50.0);
    ASSERT_LT(d, previous);
    previous = d;
  }
}

TEST(EffectivePriority, Examples) {
  EXPECT_EQ(effective_priority(1.01, 0, with_tau(500.0)), 1.01);
  EXPECT_NEAR(effective_priority(1.01, 500, with_tau(500.0)), 0.371558, 1e-5);
  EXPECT_EQ(effective_priority(3.01, 1e6, with_tau(std::numeric_limits<double>::infinity())), 3.01);
  EXPECT_THROW(effective_priority(0.0, 1, with_tau(5.0)), Error);
}

TEST(EffectivePriority, HalfLife) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> base(1e-3, 1e3);
  std::uniform_real_distribution<double> tau(1.0, 1e5);
  for (int i = 0; i < 100; ++i) {
    const double b = base(rng);
    const double t = tau(rng);
    const double p = effective_priority(b, t * std::numbers::ln2, with_tau(t));
    EXPECT_NEAR(p, b / 2.0, 1e-9 * b) << b << " " << t;
  }
}

TEST(EffectivePriority, MonotoneInAgeAndBase) {
  const auto c = with_tau(300.0);
  for (int age = 0; age < 1000; age += 7) {
    EXPECT_GT(effective_priority(2.0, age, c), effective_priority(2.0, age + 1, c));
    EXPECT_LT(effective_priority(2.0, age, c), effective_priority(2.0 + 1e-6, age, c));
  }
}

TEST(EffectivePriority, OldEntryIsOvertakenPastTheCrossover) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double b_new = 0.01 + unit(rng) * 5.0;
    const double b_old = b_new * (1.5 + unit(rng) * 20.0);
    const double tau = 10.0 + unit(rng) * 1000.0;
    const auto c = with_tau(tau);
    // Crossover age where b_old exp(-age/tau) = b_new.
    const double crossover = tau * std::log(b_old / b_new);
    EXPECT_GT(effective_priority(b_old, crossover - 1.0, c), b_new);
    EXPECT_LT(effective_priority(b_old, crossover + 1.0, c), b_new);
  }
}

TEST(EffectivePriority, InfiniteTauIsBitIdenticalToBase) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(-50.0, 50.0);
  PriorityConfig c = with_tau(std::numeric_limits<double>::infinity());
  for (int i = 0; i < 10000; ++i) {
    const double reward = unit(rng);
    const double age = std::floor(std::abs(unit(rng)) * 1e5);
    const double base = base_priority({reward, {}, {}}, c);
    const double p = effective_priority(base, age, c);
    ASSERT_EQ(std::memcmp(&p, &base, sizeof p), 0);
  }
}

TEST(EffectivePriority, UnderflowIsFlooredAboveZero) {
  const double p = effective_priority(2.0, 1e6, with_tau(1.0));
  EXPECT_GT(p, 0.0);
  EXPECT_EQ(p, 2.0 * kMinDecay);
}

TEST(BetaSchedule, Examples) {
  PriorityConfig c;
  EXPECT_EQ(beta_at(1000000, c), 0.4);
  c.beta_end = 1.0;
  c.beta_anneal_steps = 100;
  EXPECT_NEAR(beta_at(50, c), 0.7, 1e-12);
  EXPECT_EQ(beta_at(200, c), 1.0);
  EXPECT_EQ(beta_at(0, c), 0.4);
}

}  // namespace
}  // namespace freshreplay
