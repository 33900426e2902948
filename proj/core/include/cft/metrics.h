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

// Evaluation estimators for the three causal tasks: effect estimation (MSE),
// effect ordering (level-based AUUC) and effect classification (IPW policy
// value, effect-weighted misclassification).

#ifndef CFT_METRICS_H_
#define CFT_METRICS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "cft/dataset.h"

namespace cft {

// Observations grouped into m levels by score rank. Level of row i is
// floor(m * F_i) with F_i the fraction of rows scoring strictly below it, so
// tied scores always share a level. cum_count[r][t] and cum_sum[r][t] hold the
// count and outcome sum of arm t over levels >= r.
struct LevelPartition {
  int m = 0;
  std::vector<int> level_of;
  std::vector<std::array<double, 2>> cum_count;
  std::vector<std::array<double, 2>> cum_sum;

  // R(r,1)/N(r,1) - R(r,0)/N(r,0); zero when an arm is empty at rank r.
  double incremental_effect(int r) const;
  bool degenerate(int r) const {
    return cum_count[r][0] == 0.0 || cum_count[r][1] == 0.0;
  }
};

struct PolicyConfig {
  double cost = 0.0;       // per-treatment cost
  double threshold = 0.0;  // treat when score > threshold
  std::optional<double> top_fraction;
};

struct AuucResult {
  double value = 0.0;
  int degenerate_ranks = 0;  // ranks where an arm was empty
};

double mse_true(const ScoreVector& scores, const SimulatedTruth& truth);

// Bins are percentile groups of `binning_scores`; each bin contributes the
// squared gap between its difference-in-means effect and its mean score.
double binned_mse(const ScoreVector& scores, const ScoreVector& binning_scores,
                  const ExperimentDataset& d, int n_bins = 10);

// floor(m * #{j : s_i > s_j} / n) for every row, computed in integers.
std::vector<int> rank_levels(const ScoreVector& scores, int m);

LevelPartition build_levels(const ScoreVector& scores,
                            const ExperimentDataset& d, int m);

// sum_{q=1..m} (q/m) * V(m - q).
double auuc_from_levels(const LevelPartition& levels);
AuucResult auuc_detailed(const ScoreVector& scores, const ExperimentDataset& d,
                         int m = 10);
double auuc(const ScoreVector& scores, const ExperimentDataset& d, int m = 10);

// IPW estimate of the expected outcome of `actions`, net of cost.
double policy_value(const std::vector<int>& actions,
                    const ExperimentDataset& d, const PolicyConfig& cfg);

// Same quantity computed from known potential outcomes.
double policy_value_true(const std::vector<int>& actions,
                         const SimulatedTruth& truth, const PolicyConfig& cfg);

std::vector<int> threshold_actions(const ScoreVector& scores, double threshold);

// Treats the ceil(q * n) highest scores; ties go to the lower row index.
std::vector<int> topq_actions(const ScoreVector& scores, double q);

// Actions chosen by cfg: top-q when top_fraction is set, threshold otherwise.
std::vector<int> policy_actions(const ScoreVector& scores,
                                const PolicyConfig& cfg);

double ewm_true(const ScoreVector& scores, const SimulatedTruth& truth,
                const PolicyConfig& cfg);

}  // namespace cft

#endif  // CFT_METRICS_H_
