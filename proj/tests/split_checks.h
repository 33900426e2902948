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

// Re-scans every node of a fitted tree against a brute-force criterion.

#ifndef CFT_TESTS_SPLIT_CHECKS_H_
#define CFT_TESTS_SPLIT_CHECKS_H_

#include <functional>
#include <string>
#include <vector>

#include "cft/tree.h"
#include "oracles.h"

namespace cft::oracle {

using Gain = std::function<double(const std::vector<std::size_t>& parent,
                                  const std::vector<std::size_t>& left,
                                  const std::vector<std::size_t>& right)>;

// Empty string when every split is a maximal candidate, every stopped node
// had no candidate above min_gain, and the leaves partition the rows.
// Requires n_split_quantiles large enough that no thinning happens.
inline std::string check_tree(const Tree& tree,
                              const std::vector<std::vector<double>>& cols,
                              const ExperimentDataset& d, const FitConfig& cfg,
                              const Gain& gain) {
  const auto& nodes = tree.nodes();
  std::vector<std::vector<std::size_t>> rows(nodes.size());
  std::vector<int> depth(nodes.size(), 0);
  rows[0] = all_rows(d.size());
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    const auto& node = nodes[id];
    const auto cands = splits(cols, d, rows[id], cfg.min_leaf, cfg.min_arm);
    double best = -1e300;
    std::vector<double> gains;
    for (const auto& c : cands) {
      std::vector<std::size_t> l, r;
      for (std::size_t i : rows[id]) {
        (cols[c.feature][i] <= c.threshold ? l : r).push_back(i);
      }
      gains.push_back(gain(rows[id], l, r));
      best = std::max(best, gains.back());
    }
    if (node.is_leaf()) {
      if (depth[id] < cfg.max_depth && !cands.empty() &&
          best > cfg.min_gain + 1e-9) {
        return "node " + std::to_string(id) + " stopped with gain " +
               std::to_string(best);
      }
      continue;
    }
    bool found = false;
    for (std::size_t k = 0; k < cands.size(); ++k) {
      if (cands[k].feature == static_cast<std::size_t>(node.feature) &&
          cands[k].threshold == node.threshold) {
        found = true;
        if (gains[k] < best - 1e-9) {
          return "node " + std::to_string(id) + " gain " +
                 std::to_string(gains[k]) + " below max " +
                 std::to_string(best);
        }
        for (std::size_t e = 0; e < k; ++e) {
          if (gains[e] > gains[k] + 1e-9) {
            return "node " + std::to_string(id) + " skipped earlier maximum";
          }
        }
      }
    }
    if (!found) return "node " + std::to_string(id) + " split not a candidate";
    for (std::size_t i : rows[id]) {
      const bool left = cols[node.feature][i] <= node.threshold;
      rows[left ? node.left : node.right].push_back(i);
    }
    depth[node.left] = depth[node.right] = depth[id] + 1;
  }
  return "";
}

inline std::vector<std::vector<double>> columns_with_score(
    const ExperimentDataset& d, const std::vector<double>& score) {
  std::vector<std::vector<double>> cols;
  for (std::size_t c = 0; c < d.num_features(); ++c) {
    cols.emplace_back(d.column(c).begin(), d.column(c).end());
  }
  cols.push_back(score);
  return cols;
}

inline double ee_gain(const ExperimentDataset& d,
                      const std::vector<std::size_t>& p,
                      const std::vector<std::size_t>& l,
                      const std::vector<std::size_t>& r) {
  const double cp = leaf_correction(d, p), cl = leaf_correction(d, l),
               cr = leaf_correction(d, r);
  const double n = static_cast<double>(p.size());
  return -cp * cp + l.size() / n * cl * cl + r.size() / n * cr * cr;
}

inline double ec_gain(const ExperimentDataset& d, double cost,
                      const std::vector<std::size_t>& p,
                      const std::vector<std::size_t>& l,
                      const std::vector<std::size_t>& r) {
  const double n = static_cast<double>(p.size());
  return l.size() / n * best_threshold(d, l, cost).value +
         r.size() / n * best_threshold(d, r, cost).value -
         best_threshold(d, p, cost).value;
}

}  // namespace cft::oracle

#endif  // CFT_TESTS_SPLIT_CHECKS_H_
