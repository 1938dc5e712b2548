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

#ifndef FRESHREPLAY_ESS_HPP
#define FRESHREPLAY_ESS_HPP

#include <cstddef>
#include <span>
#include <vector>

/**
 * \file
 * \brief Importance ratios, divergences and effective sample size over finite supports.
 *
 * Everything is computed by exact enumeration, so the relations between the quantities
 * (variance of the ratio equals chi-squared, chi-squared equals exp(Renyi-2) - 1,
 * Renyi-2 dominates KL, ESS is bounded by n exp(-KL)) hold as deterministic
 * (in)equalities up to rounding. Logarithms are natural.
 */

namespace freshreplay::ess {

/// A probability vector over a finite support.
class DiscreteDist {
 public:
  /// Throws `Error(kInvalidArgument)` unless entries are finite, non-negative and sum to 1 within 1e-9.
  explicit DiscreteDist(std::vector<double> probs);

  /// Normalizes non-negative weights.
  static DiscreteDist from_weights(std::span<const double> weights);
  /// Softmax of logits.
  static DiscreteDist softmax(std::span<const double> logits);
  static DiscreteDist uniform(std::size_t support);

  [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }
  [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
  [[nodiscard]] double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::vector<double> probs_;
};

struct DivergenceReport {
  double var_rho = 0.0;
  double chi2 = 0.0;
  double kl = 0.0;
  double renyi2 = 0.0;
  double ess = 0.0;
  double n = 0.0;
  double ess_kl_bound = 0.0;
  /// E_behavior[rho]; 1 up to rounding.
  double mean_rho = 0.0;
};

/**
 * Ratios target_i / behavior_i. Entries outside the target's support get ratio 0.
 * Throws `Error(kSupportViolation)` where target has mass and behavior has none.
 */
std::vector<double> importance_ratios(const DiscreteDist& target, const DiscreteDist& behavior);

/// Throws `Error(kInvalidArgument)` when n < 1, `Error(kSupportViolation)` as above.
DivergenceReport divergence_report(const DiscreteDist& target, const DiscreteDist& behavior, double n);

/// (sum w)^2 / sum w^2. Throws `Error(kInvalidArgument)` on empty, non-positive or non-finite input.
double empirical_ess(std::span<const double> weights);

struct DriftPoint {
  std::size_t delta = 0;
  DivergenceReport report;
};

/// Divergence of every later path element from `path[behavior_index]`, indexed by distance.
std::vector<DriftPoint> drift_ess_curve(std::span<const DiscreteDist> path, std::size_t behavior_index, double n);

/// Two-action softmax path whose logit gap grows by `gap_per_step` each step, starting at zero.
std::vector<DiscreteDist> linear_logit_drift_path(double gap_per_step, std::size_t steps);

}  // namespace freshreplay::ess

#endif  // FRESHREPLAY_ESS_HPP
