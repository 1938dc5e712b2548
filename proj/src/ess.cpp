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

#include "freshreplay/ess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "freshreplay/error.hpp"

namespace freshreplay::ess {

DiscreteDist::DiscreteDist(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "distribution support must be non-empty");
  }
  double total = 0.0;
  for (const double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kInvalidArgument, "probabilities must be finite and non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

DiscreteDist DiscreteDist::from_weights(std::span<const double> weights) {
  double total = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "weights must be finite and non-negative");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "weights must not all be zero");
  }
  std::vector<double> probs(weights.begin(), weights.end());
  for (auto& p : probs) {
    p /= total;
  }
  return DiscreteDist(std::move(probs));
}

DiscreteDist DiscreteDist::softmax(std::span<const double> logits) {
  if (logits.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "softmax of an empty vector");
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> weights(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    weights[i] = std::exp(logits[i] - peak);
  }
  return from_weights(weights);
}

DiscreteDist DiscreteDist::uniform(std::size_t support) {
  return DiscreteDist(std::vector<double>(support, 1.0 / static_cast<double>(support)));
}

std::vector<double> importance_ratios(const DiscreteDist& target, const DiscreteDist& behavior) {
  if (target.size() != behavior.size()) {
    throw Error(ErrorCode::kInvalidArgument, "distributions have different support sizes");
  }
  std::vector<double> ratios(target.size(), 0.0);
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] == 0.0) {
      continue;
    }
    if (behavior[i] == 0.0) {
      throw Error(ErrorCode::kSupportViolation,
                  "target has mass at index " + std::to_string(i) + " where behavior has none");
    }
    ratios[i] = target[i] / behavior[i];
  }
  return ratios;
}

DivergenceReport divergence_report(const DiscreteDist& target, const DiscreteDist& behavior, double n) {
  if (!(n >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sample count must be at least 1");
  }
  const auto rho = importance_ratios(target, behavior);

  // Moments under the behavior distribution.
  double mean = 0.0;
  double second = 0.0;
  double chi2 = 0.0;
  double kl = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double q = behavior[i];
    mean += q * rho[i];
    second += q * rho[i] * rho[i];
    chi2 += q * (rho[i] - 1.0) * (rho[i] - 1.0);
    if (target[i] > 0.0) {
      kl += target[i] * std::log(rho[i]);
    }
  }
  double var = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    var += behavior[i] * (rho[i] - mean) * (rho[i] - mean);
  }

  DivergenceReport report;
  report.mean_rho = mean;
  report.var_rho = var;
  report.chi2 = chi2;
  report.kl = std::max(kl, 0.0);
  report.renyi2 = std::log(second);
  report.n = n;
  report.ess = n / (1.0 + var);
  report.ess_kl_bound = n * std::exp(-report.kl);
  return report;
}

double empirical_ess(std::span<const double> weights) {
  if (weights.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empirical_ess needs at least one weight");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "weights must be positive and finite");
    }
    sum += w;
    sum_sq += w * w;
  }
  return sum * sum / sum_sq;
}

std::vector<DriftPoint> drift_ess_curve(std::span<const DiscreteDist> path, std::size_t behavior_index, double n) {
  if (path.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "drift path needs at least two distributions");
  }
  if (behavior_index >= path.size()) {
    throw Error(ErrorCode::kOutOfRange, "behavior index " + std::to_string(behavior_index) +
                                            " outside path of length " +
                                            std::to_string(path.size()));
  }
  std::vector<DriftPoint> curve;
  curve.reserve(path.size() - behavior_index);
  for (std::size_t i = behavior_index; i < path.size(); ++i) {
    curve.push_back({i - behavior_index, divergence_report(path[i], path[behavior_index], n)});
  }
  return curve;
}

std::vector<DiscreteDist> linear_logit_drift_path(double gap_per_step, std::size_t steps) {
  std::vector<DiscreteDist> path;
  path.reserve(steps + 1);
  for (std::size_t step = 0; step <= steps; ++step) {
    const double logits[2] = {gap_per_step * static_cast<double>(step), 0.0};
    path.push_back(DiscreteDist::softmax(logits));
  }
  return path;
}

}  // namespace freshreplay::ess
