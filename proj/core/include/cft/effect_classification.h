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

// Effect-classification fine-tuning: each leaf learns the base-score decision
// boundary that maximizes the inverse-propensity-weighted policy value.

#ifndef CFT_EFFECT_CLASSIFICATION_H_
#define CFT_EFFECT_CLASSIFICATION_H_

#include <span>

#include "cft/dataset.h"
#include "cft/finetuner.h"
#include "cft/tree.h"

namespace cft {

struct ThresholdResult {
  double boundary = 0.0;    // treat rows whose base score > boundary
  double value = 0.0;       // IPW policy value on the rows, net of cost
  std::size_t treated = 0;  // rows classified as treat
};

// Scans "treat none" and then every distinct base score in descending order
// as the lowest treated score, keeping the first candidate with the largest
// value. The boundary is then moved to the point closest to zero that leaves
// every row's classification unchanged.
ThresholdResult find_optimal_threshold(const ExperimentDataset& d,
                                       std::span<const std::size_t> rows,
                                       const FitConfig& cfg);

double ec_split_gain(const ExperimentDataset& d,
                     std::span<const std::size_t> parent,
                     std::span<const std::size_t> left,
                     std::span<const std::size_t> right, const FitConfig& cfg);

class EcSplitRule : public SplitRule {
 public:
  EcSplitRule(const ExperimentDataset& d, const FitConfig& cfg)
      : d_(d), cfg_(cfg) {}
  double leaf_payload(std::span<const std::size_t> rows) const override;
  void begin_node(std::span<const std::size_t> parent) override;
  double gain(std::span<const std::size_t> parent,
              std::span<const std::size_t> left,
              std::span<const std::size_t> right) const override;

 private:
  const ExperimentDataset& d_;
  const FitConfig& cfg_;
  double parent_value_ = 0.0;
};

// Tree of per-leaf boundaries over (features, base score); the tuned score
// base - boundary is positive exactly when the leaf classifier treats.
// Calibration is appended for cross-task use.
FineTuner fit_ec(const ExperimentDataset& d, const FitConfig& cfg);

}  // namespace cft

#endif  // CFT_EFFECT_CLASSIFICATION_H_
