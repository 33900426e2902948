/*
 * Copyright 2026 The causal-finetune Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cft/effect_classification.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cft {
namespace {

// Keeps candidates that differ from the incumbent only by round-off tied, so
// the treat-fewer choice survives summation-order noise.
bool improves(double candidate, double incumbent) {
  return candidate > incumbent + 1e-12 * (1.0 + std::abs(incumbent));
}

double scaled_epsilon(const FitConfig& cfg, double lo, double hi) {
  const double range = hi - lo;
  return cfg.epsilon * (range > 0.0 ? range : 1.0);
}

// Point of [lo, hi) with the smallest magnitude; lo may be -inf and hi +inf.
double closest_to_zero(double lo, double hi, double eps) {
  if (lo <= 0.0 && 0.0 < hi) return 0.0;
  if (lo > 0.0) return lo;
  double step = eps;
  if (std::isfinite(lo)) step = std::min(step, (hi - lo) / 2.0);
  double b = hi - step;
  if (!(b < hi)) b = std::nextafter(hi, -std::numeric_limits<double>::infinity());
  return b;
}

}  // namespace

ThresholdResult find_optimal_threshold(const ExperimentDataset& d,
                                       std::span<const std::size_t> rows,
                                       const FitConfig& cfg) {
  if (rows.empty()) throw Error("find_optimal_threshold: empty leaf");
  const double n = static_cast<double>(rows.size());
  const double p1 = d.propensity_treated();
  std::vector<std::size_t> order(rows.begin(), rows.end());
  const auto& score = d.base_score();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return score[a] > score[b];
  });

  double none_sum = 0.0;
  for (std::size_t i : order) {
    if (d.treatment()[i] == 0) none_sum += d.outcome()[i] / (1.0 - p1);
  }
  double running = none_sum;
  double best_value = none_sum / n;
  std::size_t best_treated = 0;
  std::size_t pos = 0;
  while (pos < order.size()) {
    const double s = score[order[pos]];
    while (pos < order.size() && score[order[pos]] == s) {
      const std::size_t i = order[pos];
      const double y = d.outcome()[i];
      running += d.treatment()[i] == 1 ? y / p1 : -y / (1.0 - p1);
      running -= cfg.treatment_cost;
      ++pos;
    }
    const double value = running / n;
    if (improves(value, best_value)) {
      best_value = value;
      best_treated = pos;
    }
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double top = score[order.front()];
  const double bottom = score[order.back()];
  // Classification-preserving interval for the chosen boundary.
  const double hi = best_treated == 0 ? kInf : score[order[best_treated - 1]];
  const double lo = best_treated == order.size() ? -kInf : score[order[best_treated]];
  ThresholdResult res;
  res.value = best_value;
  res.treated = best_treated;
  res.boundary = closest_to_zero(lo, hi, scaled_epsilon(cfg, bottom, top));
  return res;
}

double ec_split_gain(const ExperimentDataset& d,
                     std::span<const std::size_t> parent,
                     std::span<const std::size_t> left,
                     std::span<const std::size_t> right, const FitConfig& cfg) {
  const double n = static_cast<double>(parent.size());
  return (static_cast<double>(left.size()) / n) *
             find_optimal_threshold(d, left, cfg).value +
         (static_cast<double>(right.size()) / n) *
             find_optimal_threshold(d, right, cfg).value -
         find_optimal_threshold(d, parent, cfg).value;
}

double EcSplitRule::leaf_payload(std::span<const std::size_t> rows) const {
  return find_optimal_threshold(d_, rows, cfg_).boundary;
}

void EcSplitRule::begin_node(std::span<const std::size_t> parent) {
  parent_value_ = find_optimal_threshold(d_, parent, cfg_).value;
}

double EcSplitRule::gain(std::span<const std::size_t> parent,
                         std::span<const std::size_t> left,
                         std::span<const std::size_t> right) const {
  const double n = static_cast<double>(parent.size());
  return (static_cast<double>(left.size()) / n) *
             find_optimal_threshold(d_, left, cfg_).value +
         (static_cast<double>(right.size()) / n) *
             find_optimal_threshold(d_, right, cfg_).value -
         parent_value_;
}

FineTuner fit_ec(const ExperimentDataset& d, const FitConfig& cfg) {
  cfg.validate();
  FineTuner f;
  f.kind = FineTunerKind::kEC;
  f.feature_names = d.feature_names();
  f.config = cfg;
  const FeatureMatrix x(d, &d.base_score());
  EcSplitRule rule(d, cfg);
  Tree tree = grow_tree(d, x, all_rows(d.size()), rule, cfg);
  ScoreVector tuned(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    tuned[i] = d.base_score()[i] - tree.predict(x, i);
  }
  f.stages.push_back(TreeStage{std::move(tree), false, true});
  f.stages.push_back(CalibrationStage{fit_calibration(tuned, d)});
  return f;
}

}  // namespace cft
