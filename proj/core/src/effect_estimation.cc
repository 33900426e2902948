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

#include "cft/effect_estimation.h"

#include <string>

namespace cft {
namespace {

struct ArmSums {
  double count[2] = {0.0, 0.0};
  double outcome[2] = {0.0, 0.0};
  double base = 0.0;
};

ArmSums accumulate(const ExperimentDataset& d,
                   std::span<const std::size_t> rows) {
  ArmSums s;
  for (std::size_t i : rows) {
    const int t = d.treatment()[i];
    s.count[t] += 1.0;
    s.outcome[t] += d.outcome()[i];
    s.base += d.base_score()[i];
  }
  return s;
}

double correction_from(const ArmSums& s) {
  if (s.count[0] == 0.0 || s.count[1] == 0.0) {
    throw Error("ee_leaf_correction: leaf has no " +
                std::string(s.count[0] == 0.0 ? "control" : "treated") +
                " rows");
  }
  const double n = s.count[0] + s.count[1];
  return s.base / n -
         (s.outcome[1] / s.count[1] - s.outcome[0] / s.count[0]);
}

double weighted_gain(double parent, double left, double right, double n_left,
                     double n_right) {
  const double n = n_left + n_right;
  return -parent * parent + (n_left / n) * left * left +
         (n_right / n) * right * right;
}

FineTuner fit_correction_tree(const ExperimentDataset& d, FineTunerKind kind,
                              const FitConfig& cfg) {
  cfg.validate();
  FineTuner f;
  f.kind = kind;
  f.feature_names = d.feature_names();
  f.config = cfg;
  const RowIndices rows = all_rows(d.size());

  ScoreVector working = d.base_score();
  ExperimentDataset train = d;
  const bool zero_base = kind == FineTunerKind::kCT || kind == FineTunerKind::kCTBS;
  const bool score_feature = kind != FineTunerKind::kCT;
  if (kind == FineTunerKind::kEE) {
    const auto pre = fit_calibration(working, d);
    working = apply_calibration(pre, working);
    f.stages.push_back(CalibrationStage{pre});
  }
  // Split features see the score entering the tree stage.
  const FeatureMatrix x(d, score_feature ? &working : nullptr);
  if (zero_base) {
    train = d.with_base_score(ScoreVector(d.size(), 0.0));
  } else {
    train = d.with_base_score(working);
  }
  EeSplitRule rule(train);
  Tree tree = grow_tree(train, x, rows, rule, cfg);

  ScoreVector tuned(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double base = zero_base ? 0.0 : working[i];
    tuned[i] = base - tree.predict(x, i);
  }
  f.stages.push_back(TreeStage{std::move(tree), zero_base, score_feature});
  f.stages.push_back(CalibrationStage{fit_calibration(tuned, d)});
  return f;
}

}  // namespace

double ee_leaf_correction(const ExperimentDataset& d,
                          std::span<const std::size_t> rows) {
  return correction_from(accumulate(d, rows));
}

double ee_split_gain(const ExperimentDataset& d,
                     std::span<const std::size_t> parent,
                     std::span<const std::size_t> left,
                     std::span<const std::size_t> right) {
  return weighted_gain(ee_leaf_correction(d, parent),
                       ee_leaf_correction(d, left),
                       ee_leaf_correction(d, right),
                       static_cast<double>(left.size()),
                       static_cast<double>(right.size()));
}

double EeSplitRule::leaf_payload(std::span<const std::size_t> rows) const {
  return ee_leaf_correction(d_, rows);
}

void EeSplitRule::begin_node(std::span<const std::size_t> parent) {
  parent_correction_ = ee_leaf_correction(d_, parent);
}

double EeSplitRule::gain(std::span<const std::size_t> /*parent*/,
                         std::span<const std::size_t> left,
                         std::span<const std::size_t> right) const {
  return weighted_gain(parent_correction_, ee_leaf_correction(d_, left),
                       ee_leaf_correction(d_, right),
                       static_cast<double>(left.size()),
                       static_cast<double>(right.size()));
}

FineTuner fit_ee(const ExperimentDataset& d, const FitConfig& cfg) {
  return fit_correction_tree(d, FineTunerKind::kEE, cfg);
}

FineTuner fit_causal_tree(const ExperimentDataset& d,
                          bool include_base_as_feature, const FitConfig& cfg) {
  return fit_correction_tree(
      d, include_base_as_feature ? FineTunerKind::kCTBS : FineTunerKind::kCT,
      cfg);
}

}  // namespace cft
