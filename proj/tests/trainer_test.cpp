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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "freshreplay/config.hpp"
#include "freshreplay/error.hpp"
#include "freshreplay/policy.hpp"
#include "freshreplay/trainer.hpp"

namespace freshreplay {
namespace {

PolicyState random_policy(std::int32_t states, std::mt19937_64& rng, double scale = 1.0) {
  PolicyState p(states, kNumActions);
  std::normal_distribution<double> normal(0.0, scale);
  for (auto& v : p.logits) {
    v = normal(rng);
  }
  for (auto& v : p.baseline) {
    v = normal(rng);
  }
  return p;
}

std::vector<WeightedTrajectory> weighted(const std::vector<Trajectory>& episodes, double weight) {
  std::vector<WeightedTrajectory> out;
  for (const auto& t : episodes) {
    out.push_back({&t, weight});
  }
  return out;
}

// Loss written out from scratch over raw logits; advantages come from `batch` and stay fixed.
double reference_loss(const std::vector<double>& logits, const std::vector<double>& baseline,
                      const PreparedBatch& batch, double eps) {
  double total = 0.0;
  for (const auto& trajectory : batch.trajectories) {
    double sum = 0.0;
    for (const auto& s : trajectory.steps) {
      const double* row = logits.data() + static_cast<std::size_t>(s.state) * kNumActions;
      double top = row[0];
      for (int b = 1; b < kNumActions; ++b) {
        top = std::max(top, row[b]);
      }
      double z = 0.0;
      for (int b = 0; b < kNumActions; ++b) {
        z += std::exp(row[b] - top);
      }
      const double pi = std::exp(row[s.action] - top) / z;
      const double rho = pi / std::exp(s.behavior_logprob);
      const double clipped = std::min(std::max(rho, 1.0 - eps), 1.0 + eps);
      const double v = baseline[static_cast<std::size_t>(s.state)] - s.return_to_go;
      sum += -clipped * s.advantage + 0.5 * v * v;
    }
    total += trajectory.is_weight * sum / static_cast<double>(trajectory.steps.size());
  }
  return total / static_cast<double>(batch.trajectories.size());
}

RunConfig small_config(Method method, std::uint64_t seed = 3) {
  RunConfig c;
  c.method = method;
  c.seed = seed;
  c.rollout_batch = 16;
  c.batch_size_b = 8;
  c.buffer_capacity = 200;
  c.max_iterations = 10;
  return c;
}

TEST(Whiten, StandardizesWithPopulationStd) {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  ASSERT_TRUE(whiten(v));
  const double s = std::sqrt(1.25);
  EXPECT_DOUBLE_EQ(v[0], -1.5 / s);
  EXPECT_DOUBLE_EQ(v[3], 1.5 / s);
  std::vector<double> one{5.0};
  EXPECT_FALSE(whiten(one));
  EXPECT_EQ(one[0], 5.0);
  std::vector<double> flat{2.0, 2.0, 2.0};
  EXPECT_FALSE(whiten(flat));
  EXPECT_EQ(flat[1], 2.0);
}

TEST(PrepareBatch, ReturnsToGoAndClippedAdvantages) {
  PolicyState p(3, kNumActions);
  const double lp = std::log(0.25);
  const auto t = make_trajectory({Step{0, 1, -1.0, lp, 1, false}, Step{1, 2, -100.0, lp, 2, false},
                                  Step{2, 0, 0.0, lp, 0, true}},
                                 0);
  const std::vector<WeightedTrajectory> batch{{&t, 1.0}};
  const auto prepared = prepare_batch(p, batch, 0.2);
  ASSERT_TRUE(prepared.whitened);
  const auto& steps = prepared.trajectories[0].steps;
  EXPECT_EQ(steps[0].return_to_go, -101.0);
  EXPECT_EQ(steps[1].return_to_go, -100.0);
  EXPECT_EQ(steps[2].return_to_go, 0.0);
  for (const auto& s : steps) {
    EXPECT_LE(std::abs(s.advantage), 0.2);
  }
  EXPECT_EQ(steps[0].advantage, -0.2);
  EXPECT_EQ(steps[2].advantage, 0.2);
  EXPECT_THROW(prepare_batch(p, std::vector<WeightedTrajectory>{}, 0.2), Error);
}

TEST(PrepareBatch, RejectsMissingLogProb) {
  PolicyState p(2, kNumActions);
  const auto t = make_trajectory({Step{0, 1, 1.0, std::nan(""), 1, true}}, 0);
  const std::vector<WeightedTrajectory> batch{{&t, 1.0}};
  EXPECT_THROW(prepare_batch(p, batch, 0.2), Error);
}

TEST(Gradient, FreshRatiosAreOne) {
  std::mt19937_64 rng(5);
  GridEnv env(EnvKind::kCliffWalking);
  const auto policy = random_policy(env.num_states(), rng, 0.5);
  const auto episodes = rollout(policy, env, 8, rng, 0);
  const auto prepared = prepare_batch(policy, weighted(episodes, 1.0), 0.2);
  const auto g = compute_gradient(policy, prepared, 0.2);
  EXPECT_NEAR(g.mean_ratio, 1.0, 1e-12);
  EXPECT_EQ(g.clip_fraction, 0.0);
}

TEST(Gradient, LinearInWeights) {
  std::mt19937_64 rng(6);
  GridEnv env(EnvKind::kCliffWalking);
  const auto behavior = random_policy(env.num_states(), rng, 0.5);
  auto learner = behavior;
  for (auto& v : learner.logits) {
    v += std::normal_distribution<double>(0.0, 0.1)(rng);
  }
  const auto episodes = rollout(behavior, env, 8, rng, 0);
  const auto full = compute_gradient(learner, prepare_batch(learner, weighted(episodes, 1.0), 0.2), 0.2);
  const auto half = compute_gradient(learner, prepare_batch(learner, weighted(episodes, 0.5), 0.2), 0.2);
  EXPECT_NEAR(half.loss, 0.5 * full.loss, 1e-12 * std::abs(full.loss));
  for (std::size_t i = 0; i < full.logits.size(); ++i) {
    ASSERT_NEAR(half.logits[i], 0.5 * full.logits[i], 1e-15);
  }
  for (std::size_t i = 0; i < full.baseline.size(); ++i) {
    ASSERT_NEAR(half.baseline[i], 0.5 * full.baseline[i], 1e-12);
  }
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  constexpr double kEps = 0.2;
  constexpr double kH = 1e-5;
  int checked = 0;
  for (int instance = 0; instance < 100; ++instance) {
    auto policy = random_policy(3, rng);
    std::uniform_int_distribution<int> state(0, 2);
    std::uniform_int_distribution<int> action(0, kNumActions - 1);
    std::uniform_int_distribution<int> length(1, 4);
    std::uniform_real_distribution<double> shift(-0.5, 0.5);
    std::uniform_real_distribution<double> reward(-2.0, 2.0);
    std::uniform_real_distribution<double> weight(0.2, 1.0);
    std::vector<Trajectory> episodes;
    bool near_kink = false;
    for (int e = 0; e < 3; ++e) {
      std::vector<Step> steps;
      const int n = length(rng);
      for (int t = 0; t < n; ++t) {
        const int s = state(rng);
        const int a = action(rng);
        // Behavior log-probs near the learner's so some ratios land in range and some do not.
        const double mu = std::min(policy.log_prob(s, a) + shift(rng), -1e-3);
        const double rho = std::exp(policy.log_prob(s, a) - mu);
        near_kink |= std::abs(rho - (1.0 - kEps)) < 1e-3 || std::abs(rho - (1.0 + kEps)) < 1e-3;
        steps.push_back(Step{s, a, reward(rng), mu, state(rng), t + 1 == n});
      }
      episodes.push_back(make_trajectory(std::move(steps), 0));
    }
    if (near_kink) {
      continue;
    }
    std::vector<WeightedTrajectory> batch;
    for (const auto& t : episodes) {
      batch.push_back({&t, weight(rng)});
    }
    const auto prepared = prepare_batch(policy, batch, 0.5);
    const auto g = compute_gradient(policy, prepared, kEps);
    EXPECT_NEAR(g.loss, reference_loss(policy.logits, policy.baseline, prepared, kEps), 1e-12);
    for (std::size_t i = 0; i < policy.logits.size(); ++i) {
      auto up = policy.logits;
      auto down = policy.logits;
      up[i] += kH;
      down[i] -= kH;
      const double fd = (reference_loss(up, policy.baseline, prepared, kEps) -
                         reference_loss(down, policy.baseline, prepared, kEps)) /
                        (2.0 * kH);
      ASSERT_NEAR(g.logits[i], fd, 1e-4) << instance << " logit " << i;
    }
    for (std::size_t i = 0; i < policy.baseline.size(); ++i) {
      auto up = policy.baseline;
      auto down = policy.baseline;
      up[i] += kH;
      down[i] -= kH;
      const double fd = (reference_loss(policy.logits, up, prepared, kEps) -
                         reference_loss(policy.logits, down, prepared, kEps)) /
                        (2.0 * kH);
      ASSERT_NEAR(g.baseline[i], fd, 1e-4) << instance << " baseline " << i;
    }
    ++checked;
  }
  EXPECT_GE(checked, 80);
}

TEST(Gradient, ValueWeightZeroDropsBaseline) {
  std::mt19937_64 rng(8);
  GridEnv env(EnvKind::kCliffWalking);
  const auto policy = random_policy(env.num_states(), rng, 0.5);
  const auto episodes = rollout(policy, env, 4, rng, 0);
  const auto prepared = prepare_batch(policy, weighted(episodes, 1.0), 0.2);
  const auto g = compute_gradient(policy, prepared, 0.2, 0.0);
  for (const double v : g.baseline) {
    EXPECT_EQ(v, 0.0);
  }
  const auto with = compute_gradient(policy, prepared, 0.2, 1.0);
  EXPECT_EQ(g.logits, with.logits);
}

TEST(Update, StepsUseTheirOwnRates) {
  std::mt19937_64 rng(9);
  GridEnv env(EnvKind::kCliffWalking);
  const auto start = random_policy(env.num_states(), rng, 0.5);
  const auto episodes = rollout(start, env, 4, rng, 0);
  RunConfig config;
  config.learning_rate = 3.0;
  config.baseline_learning_rate = 0.5;
  auto policy = start;
  const auto g = compute_gradient(start, prepare_batch(start, weighted(episodes, 1.0), 0.2), 0.2);
  policy_gradient_update(policy, weighted(episodes, 1.0), config);
  EXPECT_EQ(policy.version, start.version + 1);
  for (std::size_t i = 0; i < g.logits.size(); ++i) {
    ASSERT_DOUBLE_EQ(policy.logits[i], start.logits[i] - 3.0 * g.logits[i]);
  }
  for (std::size_t i = 0; i < g.baseline.size(); ++i) {
    ASSERT_DOUBLE_EQ(policy.baseline[i], start.baseline[i] - 0.5 * g.baseline[i]);
  }
  auto frozen = start;
  policy_gradient_update(frozen, weighted(episodes, 1.0), config, false);
  EXPECT_EQ(frozen.baseline, start.baseline);
}

TEST(Rollout, RecordsBehaviorLogProbs) {
  std::mt19937_64 rng(10);
  GridEnv env(EnvKind::kCliffWalking);
  auto behavior = random_policy(env.num_states(), rng);
  behavior.version = 17;
  for (const auto& t : rollout(behavior, env, 10, rng, 33)) {
    EXPECT_EQ(t.behavior_version, 17);
    EXPECT_EQ(t.collection_step, 33);
    EXPECT_NO_THROW(validate_trajectory(t, 200));
    for (const auto& s : t.steps) {
      ASSERT_EQ(s.behavior_logprob, behavior.log_prob(s.state_id, s.action_id));
    }
  }
  PolicyState wrong(3, kNumActions);
  EXPECT_THROW(rollout(wrong, env, 1, rng, 0), Error);
}

TEST(PrioritySignal, ReturnAdvantageAndTd) {
  PolicyState p(3, kNumActions);
  p.baseline = {1.0, 2.0, 0.5};
  const double lp = std::log(0.25);
  const auto t = make_trajectory({Step{0, 0, -1.0, lp, 1, false}, Step{1, 0, 3.0, lp, 2, true}}, 0);
  const auto s = priority_signal(t, p);
  EXPECT_EQ(s.reward, 2.0);
  EXPECT_EQ(*s.advantage, 1.0);
  // deltas: -1 + 2 - 1 = 0 and 3 + 0 - 2 = 1.
  EXPECT_DOUBLE_EQ(*s.td_error, std::sqrt(0.5));
}

TEST(Experiment, ReplayRatioSetsGradientSteps) {
  Experiment exp(small_config(Method::kFreshPer));
  for (int i = 1; i <= 4; ++i) {
    const auto m = exp.run_iteration();
    EXPECT_EQ(m.gradient_steps, 3 * i);
    EXPECT_EQ(m.iteration, i - 1);
    EXPECT_EQ(m.buffer_occupancy, std::min<std::size_t>(16u * i, 200u));
  }
  Experiment on(small_config(Method::kOnPolicy));
  for (int i = 1; i <= 4; ++i) {
    EXPECT_EQ(on.run_iteration().gradient_steps, i);
  }
  EXPECT_EQ(on.buffer(), nullptr);
}

TEST(Experiment, UpdatesOnlyUseOlderBehaviorVersions) {
  Experiment exp(small_config(Method::kFreshPer));
  for (int i = 0; i < 6; ++i) {
    const auto before = exp.behavior();
    const std::int64_t version = exp.policy().version;
    exp.run_iteration();
    for (const auto& t : exp.last_rollout()) {
      ASSERT_EQ(t.behavior_version, version);
      for (const auto& s : t.steps) {
        ASSERT_EQ(s.behavior_logprob, before.log_prob(s.state_id, s.action_id));
      }
    }
    for (const auto v : exp.last_update_behavior_versions()) {
      ASSERT_LE(v, version);
    }
    EXPECT_EQ(exp.behavior(), exp.policy());
  }
}

TEST(Experiment, NoReplayMatchesOnPolicy) {
  auto config = small_config(Method::kFreshPer);
  config.replay_ratio_k = 0;
  Experiment fresh(config);
  Experiment on(small_config(Method::kOnPolicy));
  for (int i = 0; i < 5; ++i) {
    const auto a = fresh.run_iteration();
    const auto b = on.run_iteration();
    EXPECT_EQ(a.mean_return, b.mean_return);
  }
  EXPECT_EQ(fresh.policy(), on.policy());
}

TEST(Experiment, InfiniteTauMatchesStandardPer) {
  auto config = small_config(Method::kFreshPer);
  config.priority.tau = kInfinity;
  Experiment fresh(config);
  Experiment standard(small_config(Method::kStandardPer));
  for (int i = 0; i < 5; ++i) {
    const auto a = fresh.run_iteration();
    const auto b = standard.run_iteration();
    EXPECT_EQ(a.mean_return, b.mean_return);
    EXPECT_EQ(a.mean_sampled_age, b.mean_sampled_age);
    EXPECT_EQ(a.mean_is_weight, b.mean_is_weight);
  }
  EXPECT_EQ(fresh.policy(), standard.policy());
}

TEST(Experiment, SeedsReproduce) {
  Experiment a(small_config(Method::kFreshPer, 11));
  Experiment b(small_config(Method::kFreshPer, 11));
  for (int i = 0; i < 4; ++i) {
    a.run_iteration();
    b.run_iteration();
  }
  EXPECT_EQ(a.policy(), b.policy());
}

TEST(Checkpoint, RoundTrip) {
  std::mt19937_64 rng(12);
  auto p = random_policy(48, rng);
  p.version = 123456789012LL;
  std::stringstream buffer;
  write_checkpoint(p, buffer);
  EXPECT_EQ(buffer.str().size(), 4u + 4u + 4u + 4u + 8u + 8u * 48u * 4u + 8u * 48u);
  EXPECT_EQ(buffer.str().substr(0, 4), "FRPS");
  const auto q = read_checkpoint(buffer);
  EXPECT_EQ(p, q);
}

TEST(Checkpoint, RejectsCorruptInput) {
  std::stringstream bad_magic("XXXX\x01\x00\x00\x00");
  EXPECT_THROW(read_checkpoint(bad_magic), Error);
  PolicyState p(2, kNumActions);
  std::stringstream full;
  write_checkpoint(p, full);
  std::stringstream truncated(full.str().substr(0, full.str().size() - 3));
  EXPECT_THROW(read_checkpoint(truncated), Error);
  EXPECT_THROW(load_checkpoint("/nonexistent/dir/policy.bin"), Error);
}

}  // namespace
}  // namespace freshreplay
