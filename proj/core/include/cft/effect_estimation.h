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

// Effect-estimation fine-tuning: per-leaf mean-bias corrections of the base
// score, grown with a variance-style split criterion. The causal-tree
// baselines reuse the same machinery on a zero base score.

#ifndef CFT_EFFECT_ESTIMATION_H_
#define CFT_EFFECT_ESTIMATION_H_

#include <span>

#include "cft/dataset.h"
#include "cft/finetuner.h"
#include "cft/tree.h"

namespace cft {

// mean(base score) - (mean treated outcome - mean control outcome).
// Throws when either arm is empty.
double ee_leaf_correction(const ExperimentDataset& d,
                          std::span<const std::size_t> rows);

// -c_P^2 + (n_L/n_P) c_L^2 + (n_R/n_P) c_R^2 with c the leaf corrections.
double ee_split_gain(const ExperimentDataset& d,
                     std::span<const std::size_t> parent,
                     std::span<const std::size_t> left,
                     std::span<const std::size_t> right);

class EeSplitRule : public SplitRule {
 public:
  explicit EeSplitRule(const ExperimentDataset& d) : d_(d) {}
  double leaf_payload(std::span<const std::size_t> rows) const override;
  void begin_node(std::span<const std::size_t> parent) override;
  double gain(std::span<const std::size_t> parent,
              std::span<const std::size_t> left,
              std::span<const std::size_t> right) const override;

 private:
  const ExperimentDataset& d_;
  double parent_correction_ = 0.0;
};

// Pipeline: calibrate, subtract tree corrections grown on (features,
// calibrated score), calibrate again.
FineTuner fit_ee(const ExperimentDataset& d, const FitConfig& cfg);

// Causal-tree baseline: leaves estimate the effect directly (base score
// replaced by zero), followed by calibration. include_base_as_feature adds
// the raw base score as a split feature.
FineTuner fit_causal_tree(const ExperimentDataset& d,
                          bool include_base_as_feature, const FitConfig& cfg);

}  // namespace cft

#endif  // CFT_EFFECT_ESTIMATION_H_
