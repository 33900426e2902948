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

#include "cft/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cft {
namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw Error(std::string(what) + ": length mismatch");
}

}  // namespace

double LevelPartition::incremental_effect(int r) const {
  if (degenerate(r)) return 0.0;
  return cum_sum[r][1] / cum_count[r][1] - cum_sum[r][0] / cum_count[r][0];
}

double mse_true(const ScoreVector& scores, const SimulatedTruth& truth) {
  require_same_length(scores.size(), truth.cate.size(), "mse_true");
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double e = truth.cate[i] - scores[i];
    acc += e * e;
  }
  return acc / static_cast<double>(scores.size());
}

std::vector<int> rank_levels(const ScoreVector& scores, int m) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  std::vector<int> level(n);
  std::size_t below = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (p > 0 && scores[order[p]] != scores[order[p - 1]]) below = p;
    level[order[p]] = static_cast<int>((static_cast<std::size_t>(m) * below) / n);
  }
  return level;
}

double binned_mse(const ScoreVector& scores, const ScoreVector& binning_scores,
                  const ExperimentDataset& d, int n_bins) {
  require_same_length(scores.size(), d.size(), "binned_mse");
  require_same_length(binning_scores.size(), d.size(), "binned_mse");
  if (n_bins < 1) throw Error("binned_mse: n_bins must be positive");
  const auto bin = rank_levels(binning_scores, n_bins);
  std::vector<std::array<double, 2>> count(n_bins, {0.0, 0.0});
  std::vector<std::array<double, 2>> sum_y(n_bins, {0.0, 0.0});
  std::vector<double> sum_score(n_bins, 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int b = bin[i];
    const int t = d.treatment()[i];
    count[b][t] += 1.0;
    sum_y[b][t] += d.outcome()[i];
    sum_score[b] += scores[i];
  }
  double acc = 0.0;
  int used = 0;
  for (int b = 0; b < n_bins; ++b) {
    const double rows = count[b][0] + count[b][1];
    if (rows == 0.0) continue;  // only possible with tied binning scores
    if (count[b][0] == 0.0 || count[b][1] == 0.0) {
      throw Error("binned_mse: bin " + std::to_string(b) +
                  " has no " + (count[b][0] == 0.0 ? "control" : "treated") +
                  " observations");
    }
    const double effect = sum_y[b][1] / count[b][1] - sum_y[b][0] / count[b][0];
    const double err = effect - sum_score[b] / rows;
    acc += err * err;
    ++used;
  }
  return acc / used;
}

LevelPartition build_levels(const ScoreVector& scores,
                            const ExperimentDataset& d, int m) {
  require_same_length(scores.size(), d.size(), "build_levels");
  if (m < 1) throw Error("build_levels: m must be positive");
  LevelPartition lp;
  lp.m = m;
  lp.level_of = rank_levels(scores, m);
  lp.cum_count.assign(m, {0.0, 0.0});
  lp.cum_sum.assign(m, {0.0, 0.0});
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int t = d.treatment()[i];
    lp.cum_count[lp.level_of[i]][t] += 1.0;
    lp.cum_sum[lp.level_of[i]][t] += d.outcome()[i];
  }
  for (int r = m - 2; r >= 0; --r) {
    for (int t = 0; t < 2; ++t) {
      lp.cum_count[r][t] += lp.cum_count[r + 1][t];
      lp.cum_sum[r][t] += lp.cum_sum[r + 1][t];
    }
  }
  return lp;
}

double auuc_from_levels(const LevelPartition& levels) {
  const int m = levels.m;
  double acc = 0.0;
  for (int q = 1; q <= m; ++q) {
    acc += (static_cast<double>(q) / m) * levels.incremental_effect(m - q);
  }
  return acc;
}

AuucResult auuc_detailed(const ScoreVector& scores, const ExperimentDataset& d,
                         int m) {
  const auto levels = build_levels(scores, d, m);
  AuucResult res;
  res.value = auuc_from_levels(levels);
  for (int r = 0; r < m; ++r) res.degenerate_ranks += levels.degenerate(r);
  return res;
}

double auuc(const ScoreVector& scores, const ExperimentDataset& d, int m) {
  return auuc_detailed(scores, d, m).value;
}

double policy_value(const std::vector<int>& actions, const ExperimentDataset& d,
                    const PolicyConfig& cfg) {
  require_same_length(actions.size(), d.size(), "policy_value");
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.treatment()[i] == actions[i]) {
      acc += d.outcome()[i] / d.arm_probability(i);
    }
    acc -= actions[i] * cfg.cost;
  }
  return acc / static_cast<double>(d.size());
}

double policy_value_true(const std::vector<int>& actions,
                         const SimulatedTruth& truth, const PolicyConfig& cfg) {
  require_same_length(actions.size(), truth.size(), "policy_value_true");
  double acc = 0.0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    acc += actions[i] == 1 ? truth.y1[i] - cfg.cost : truth.y0[i];
  }
  return acc / static_cast<double>(actions.size());
}

std::vector<int> threshold_actions(const ScoreVector& scores,
                                   double threshold) {
  std::vector<int> a(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) a[i] = scores[i] > threshold;
  return a;
}

std::vector<int> topq_actions(const ScoreVector& scores, double q) {
  if (!(q > 0.0 && q <= 1.0)) throw Error("top fraction must lie in (0, 1]");
  const std::size_t n = scores.size();
  // The small slack keeps q*n that is integral in exact arithmetic from
  // rounding up to the next integer.
  const auto k = std::min(
      n, static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9)));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  std::vector<int> a(n, 0);
  for (std::size_t p = 0; p < k; ++p) a[order[p]] = 1;
  return a;
}

std::vector<int> policy_actions(const ScoreVector& scores,
                                const PolicyConfig& cfg) {
  if (cfg.top_fraction) return topq_actions(scores, *cfg.top_fraction);
  return threshold_actions(scores, cfg.threshold);
}

double ewm_true(const ScoreVector& scores, const SimulatedTruth& truth,
                const PolicyConfig& cfg) {
  require_same_length(scores.size(), truth.cate.size(), "ewm_true");
  double acc = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double beta = truth.cate[i];
    if ((beta > cfg.cost) != (scores[i] > cfg.threshold)) {
      acc += std::abs(beta - cfg.cost);
    }
  }
  return acc / static_cast<double>(scores.size());
}

}  // namespace cft
