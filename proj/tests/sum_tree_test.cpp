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

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "freshreplay/error.hpp"
#include "freshreplay/sum_tree.hpp"

namespace freshreplay {
namespace {

// Plain array with linear scans.
struct LinearOracle {
  std::vector<double> leaves;

  double total() const {
    double s = 0.0;
    for (double v : leaves) {
      s += v;
    }
    return s;
  }
  std::size_t find(double x) const {
    double cumulative = 0.0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      cumulative += leaves[i];
      if (cumulative > x && leaves[i] > 0.0) {
        return i;
      }
    }
    // x within rounding of the total: last positive leaf
    for (std::size_t i = leaves.size(); i-- > 0;) {
      if (leaves[i] > 0.0) {
        return i;
      }
    }
    return leaves.size();
  }
  double min_positive() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : leaves) {
      if (v > 0.0) {
        m = std::min(m, v);
      }
    }
    return m;
  }
};

SumTree tree_of(const std::vector<double>& leaves) {
  SumTree tree(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    tree.set_leaf(i, leaves[i]);
  }
  return tree;
}

void expect_code(ErrorCode code, const auto& body) {
  try {
    body();
    ADD_FAILURE() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(SumTree, SingleLeaf) {
  SumTree tree(8);
  EXPECT_TRUE(tree.empty());
  tree.set_leaf(0, 1.0);
  EXPECT_EQ(tree.total(), 1.0);
  EXPECT_EQ(tree.prefix_find(0.999), 0u);
}

TEST(SumTree, ZeroingALeafDropsItFromTheTotal) {
  auto tree = tree_of({1, 2, 3, 4});
  tree.set_leaf(2, 0.0);
  EXPECT_EQ(tree.total(), 7.0);
  for (double x = 0.0; x < 7.0; x += 0.01) {
    EXPECT_NE(tree.prefix_find(x), 2u);
  }
}

TEST(SumTree, PrefixFindExamples) {
  const auto tree = tree_of({1, 2, 3, 4});
  EXPECT_EQ(tree.prefix_find(0.5), 0u);
  EXPECT_EQ(tree.prefix_find(5.5), 2u);
  EXPECT_EQ(tree.prefix_find(9.99), 3u);
  EXPECT_EQ(tree.total(), 10.0);
  EXPECT_EQ(tree.min_transformed(), 1.0);
}

TEST(SumTree, BoundaryGoesToTheNextLeaf) {
  const auto tree = tree_of({1, 2, 3, 4});
  EXPECT_EQ(tree.prefix_find(0.0), 0u);
  EXPECT_EQ(tree.prefix_find(1.0), 1u);
  EXPECT_EQ(tree.prefix_find(3.0), 2u);
  EXPECT_EQ(tree.prefix_find(6.0), 3u);
}

TEST(SumTree, Singleton) {
  const auto tree = tree_of({5});
  EXPECT_EQ(tree.total(), 5.0);
  EXPECT_EQ(tree.min_transformed(), 5.0);
}

TEST(SumTree, NonPowerOfTwoCapacity) {
  SumTree tree(5);
  for (std::size_t i = 0; i < 5; ++i) {
    tree.set_leaf(i, static_cast<double>(i + 1));
  }
  EXPECT_EQ(tree.total(), 15.0);
  EXPECT_EQ(tree.prefix_find(14.5), 4u);
  expect_code(ErrorCode::kOutOfRange, [&] { tree.set_leaf(5, 1.0); });
}

TEST(SumTree, RejectsBadInput) {
  SumTree tree(4);
  expect_code(ErrorCode::kEmpty, [&] { (void)tree.prefix_find(0.0); });
  expect_code(ErrorCode::kEmpty, [&] { (void)tree.min_transformed(); });
  expect_code(ErrorCode::kOutOfRange, [&] { tree.set_leaf(4, 1.0); });
  expect_code(ErrorCode::kInvalidArgument, [&] { tree.set_leaf(0, -1.0); });
  expect_code(ErrorCode::kInvalidArgument, [&] { tree.set_leaf(0, std::nan("")); });
  expect_code(ErrorCode::kInvalidArgument,
              [&] { tree.set_leaf(0, std::numeric_limits<double>::infinity()); });
  tree.set_leaf(1, 2.0);
  expect_code(ErrorCode::kOutOfRange, [&] { (void)tree.prefix_find(2.0); });
  expect_code(ErrorCode::kOutOfRange, [&] { (void)tree.prefix_find(-0.1); });
}

TEST(SumTree, RandomLeavesMatchLinearScan) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LinearOracle oracle{std::vector<double>(1000)};
  SumTree tree(1000);
  for (auto& v : oracle.leaves) {
    v = 1.0 - unit(rng);  // (0, 1]
  }
  tree.assign(oracle.leaves);
  EXPECT_NEAR(tree.total(), oracle.total(), 1e-9 * oracle.total());
  EXPECT_EQ(tree.min_transformed(), oracle.min_positive());
}

TEST(SumTree, ManyUpdatesKeepTheTotalExactToRounding) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> slot(0, 4095);
  LinearOracle oracle{std::vector<double>(4096, 0.0)};
  SumTree tree(4096);
  for (int i = 0; i < 10000; ++i) {
    const auto s = slot(rng);
    const double v = unit(rng) < 0.1 ? 0.0 : unit(rng) * 100.0;
    oracle.leaves[s] = v;
    tree.set_leaf(s, v);
  }
  EXPECT_NEAR(tree.total(), oracle.total(), 1e-9 * oracle.total());
}

TEST(SumTree, InterleavedOperationsMatchOracleExactly) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr std::size_t kCapacity = 300;
  std::uniform_int_distribution<std::size_t> slot(0, kCapacity - 1);
  LinearOracle oracle{std::vector<double>(kCapacity, 0.0)};
  SumTree tree(kCapacity);
  for (int op = 0; op < 10000; ++op) {
    if (op < 50 || unit(rng) < 0.5) {
      const auto s = slot(rng);
      const double v = unit(rng) < 0.2 ? 0.0 : unit(rng) * 10.0;
      oracle.leaves[s] = v;
      tree.set_leaf(s, v);
      ASSERT_NEAR(tree.total(), oracle.total(), 1e-9 * std::max(1.0, oracle.total()));
    } else if (tree.total() > 0.0) {
      // Keep clear of segment boundaries where the two summation orders could disagree by rounding.
      const double x = unit(rng) * oracle.total();
      const auto expected = oracle.find(x);
      double cumulative = 0.0;
      bool near_boundary = false;
      for (std::size_t i = 0; i < kCapacity; ++i) {
        cumulative += oracle.leaves[i];
        near_boundary |= std::abs(cumulative - x) < 1e-9 * oracle.total();
      }
      if (!near_boundary) {
        ASSERT_EQ(tree.prefix_find(x), expected) << "op " << op;
      }
    }
  }
  tree.rebuild();
  EXPECT_NEAR(tree.total(), oracle.total(), 1e-9 * oracle.total());
}

TEST(SumTree, SamplingFrequenciesFollowLeafMass) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> leaves(64);
  for (auto& v : leaves) {
    v = std::pow(0.01 + unit(rng), 0.6);
  }
  const auto tree = tree_of(leaves);
  std::vector<int> counts(64, 0);
  constexpr int kDraws = 1000000;
  for (int i = 0; i < kDraws; ++i) {
    ++counts[tree.prefix_find(unit(rng) * tree.total())];
  }
  const double total = LinearOracle{leaves}.total();
  for (std::size_t i = 0; i < 64; ++i) {
    const double p = leaves[i] / total;
    const double sigma = std::sqrt(kDraws * p * (1 - p));
    EXPECT_LE(std::abs(counts[i] - kDraws * p), 4 * sigma) << i;
  }
}

TEST(SumTree, FindIsMuchFasterThanLinearScan) {
  constexpr std::size_t n = 100000;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LinearOracle oracle{std::vector<double>(n)};
  for (auto& v : oracle.leaves) {
    v = 0.1 + unit(rng);
  }
  SumTree tree(n);
  tree.assign(oracle.leaves);
  const double total = tree.total();

  using clock = std::chrono::steady_clock;
  std::size_t sink = 0;
  auto start = clock::now();
  for (int i = 0; i < 1000000; ++i) {
    sink += tree.prefix_find(unit(rng) * total);
  }
  const double tree_seconds = std::chrono::duration<double>(clock::now() - start).count();

  // Scan cost measured on a sample and scaled to the same number of finds.
  constexpr int kScans = 2000;
  start = clock::now();
  for (int i = 0; i < kScans; ++i) {
    sink += oracle.find(unit(rng) * total);
  }
  const double scan_seconds = std::chrono::duration<double>(clock::now() - start).count() * (1000000.0 / kScans);
  EXPECT_GT(scan_seconds, 10.0 * tree_seconds) << "tree " << tree_seconds << "s scan " << scan_seconds << "s";
  EXPECT_GT(sink, 0u);
}

TEST(MinTree, TracksMinimumAndLowestArgmin) {
  MinTree tree(6);
  EXPECT_TRUE(tree.empty());
  EXPECT_TRUE(std::isinf(tree.min()));
  tree.set(3, 2.0);
  tree.set(1, 2.0);
  tree.set(5, 7.0);
  EXPECT_EQ(tree.min(), 2.0);
  EXPECT_EQ(tree.argmin(), 1u);
  tree.clear(1);
  EXPECT_EQ(tree.argmin(), 3u);
  tree.clear(3);
  EXPECT_EQ(tree.min(), 7.0);
  tree.clear(5);
  EXPECT_TRUE(tree.empty());
}

TEST(MinTree, MatchesLinearScanUnderRandomUpdates) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> values(200, std::numeric_limits<double>::infinity());
  MinTree tree(200);
  for (int i = 0; i < 5000; ++i) {
    const auto s = rng() % 200;
    const double v = unit(rng) < 0.3 ? std::numeric_limits<double>::infinity() : std::floor(unit(rng) * 50);
    values[s] = v;
    tree.set(s, v);
    const auto it = std::min_element(values.begin(), values.end());
    ASSERT_EQ(tree.min(), *it);
    if (!std::isinf(*it)) {
      ASSERT_EQ(tree.argmin(), static_cast<std::size_t>(it - values.begin()));
    }
  }
}

}  // namespace
}  // namespace freshreplay
