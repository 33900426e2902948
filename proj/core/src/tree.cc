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

#include "cft/tree.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace cft {
namespace {

constexpr double kGainTolerance = 1e-12;

struct Entry {
  double value;
  int treatment;
};

}  // namespace

void FitConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw Error("invalid fit config: " + what);
  };
  if (max_depth < 0) fail("max_depth must be >= 0");
  if (min_leaf < 1) fail("min_leaf must be >= 1");
  if (min_arm < 0) fail("min_arm must be >= 0");
  if (n_split_quantiles < 1) fail("n_split_quantiles must be >= 1");
  if (m < 2) fail("m must be >= 2");
  if (n_trees < 0) fail("n_trees must be >= 0");
  if (!(min_split_fraction > 0.0 && min_split_fraction <= 0.5)) {
    fail("min_split_fraction must lie in (0, 0.5]");
  }
  if (bucket_groups < 0) fail("bucket_groups must be >= 0");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!std::isfinite(min_gain)) fail("min_gain must be finite");
  if (!std::isfinite(treatment_cost)) fail("treatment_cost must be finite");
}

FeatureMatrix::FeatureMatrix(const ExperimentDataset& d,
                             const ScoreVector* score_column)
    : rows_(d.size()),
      cols_(d.num_features() + (score_column != nullptr ? 1 : 0)),
      data_(d.features_column_major()) {
  if (score_column != nullptr) {
    if (score_column->size() != rows_) {
      throw Error("score column length mismatch");
    }
    data_.insert(data_.end(), score_column->begin(), score_column->end());
  }
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::vector<double> column_major)
    : rows_(rows),
      cols_(rows == 0 ? 0 : column_major.size() / rows),
      data_(std::move(column_major)) {
  if (cols_ * rows_ != data_.size()) throw Error("feature matrix shape mismatch");
}

std::size_t Tree::num_leaves() const {
  return static_cast<std::size_t>(std::count_if(
      nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

int Tree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.is_leaf()) continue;
    d[n.left] = d[n.right] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

int Tree::leaf_index(const FeatureMatrix& x, std::size_t row) const {
  int i = 0;
  while (!nodes_[i].is_leaf()) {
    const Node& n = nodes_[i];
    i = x.at(row, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left
                                                                      : n.right;
  }
  return i;
}

bool Tree::operator==(const Tree& other) const {
  if (nodes_.size() != other.nodes_.size()) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& a = nodes_[i];
    const Node& b = other.nodes_[i];
    if (a.feature != b.feature || a.left != b.left || a.right != b.right) {
      return false;
    }
    if (a.is_leaf() ? a.payload != b.payload : a.threshold != b.threshold) {
      return false;
    }
  }
  return true;
}

SplitConstraints constraints_from(const FitConfig& cfg) {
  return {static_cast<std::size_t>(cfg.min_leaf),
          static_cast<std::size_t>(cfg.min_arm)};
}

std::vector<SplitCandidate> enumerate_splits(
    const ExperimentDataset& d, const FeatureMatrix& x,
    std::span<const std::size_t> rows, int n_split_quantiles,
    const SplitConstraints& constraints) {
  std::vector<SplitCandidate> out;
  const std::size_t n = rows.size();
  if (n == 0) return out;
  std::size_t treated_total = 0;
  for (std::size_t i : rows) treated_total += d.treatment()[i];

  std::vector<Entry> entries(n);
  // Boundary b lies between sorted positions b-1 and b (b rows on the left).
  std::vector<std::size_t> boundaries;
  std::vector<std::size_t> treated_prefix(n + 1);
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t r = 0; r < n; ++r) {
      entries[r] = {x.at(rows[r], f), d.treatment()[rows[r]]};
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.value < b.value; });
    if (entries.front().value == entries.back().value) continue;
    treated_prefix[0] = 0;
    for (std::size_t r = 0; r < n; ++r) {
      treated_prefix[r + 1] = treated_prefix[r] + entries[r].treatment;
    }
    boundaries.clear();
    for (std::size_t r = 1; r < n; ++r) {
      if (entries[r].value != entries[r - 1].value) boundaries.push_back(r);
    }
    const auto q_count = static_cast<std::size_t>(n_split_quantiles);
    if (boundaries.size() > q_count) {
      std::vector<std::size_t> thinned;
      for (std::size_t q = 1; q <= q_count; ++q) {
        const std::size_t pos = (q * n) / (q_count + 1);
        // First boundary strictly above the quantile position.
        const auto it =
            std::upper_bound(boundaries.begin(), boundaries.end(), pos);
        if (it == boundaries.end()) continue;
        if (thinned.empty() || thinned.back() != *it) thinned.push_back(*it);
      }
      boundaries.swap(thinned);
    }
    for (std::size_t b : boundaries) {
      const std::size_t n_left = b;
      const std::size_t n_right = n - b;
      const std::size_t t_left = treated_prefix[b];
      const std::size_t t_right = treated_total - t_left;
      if (n_left < constraints.min_leaf || n_right < constraints.min_leaf) {
        continue;
      }
      if (t_left < constraints.min_arm || n_left - t_left < constraints.min_arm ||
          t_right < constraints.min_arm ||
          n_right - t_right < constraints.min_arm) {
        continue;
      }
      const double lo = entries[b - 1].value;
      const double hi = entries[b].value;
      double threshold = lo + (hi - lo) / 2.0;
      if (!(threshold < hi)) threshold = lo;
      out.push_back({f, threshold});
    }
  }
  return out;
}

void partition_rows(const FeatureMatrix& x, std::span<const std::size_t> rows,
                    const SplitCandidate& split, RowIndices& left,
                    RowIndices& right) {
  left.clear();
  right.clear();
  for (std::size_t i : rows) {
    (x.at(i, split.feature) <= split.threshold ? left : right).push_back(i);
  }
}

namespace {

class TreeGrower {
 public:
  TreeGrower(const ExperimentDataset& d, const FeatureMatrix& x,
             SplitRule& rule, const FitConfig& cfg)
      : d_(d), x_(x), rule_(rule), cfg_(cfg) {}

  int grow(const RowIndices& rows, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].n_rows = rows.size();
    nodes_[id].payload = rule_.leaf_payload(rows);
    if (depth >= cfg_.max_depth) return id;

    const auto candidates = enumerate_splits(d_, x_, rows, cfg_.n_split_quantiles,
                                             constraints_from(cfg_));
    if (candidates.empty()) return id;
    rule_.begin_node(rows);
    RowIndices left;
    RowIndices right;
    double best_gain = -std::numeric_limits<double>::infinity();
    const SplitCandidate* best = nullptr;
    for (const auto& c : candidates) {
      partition_rows(x_, rows, c, left, right);
      const double g = rule_.gain(rows, left, right);
      if (g > best_gain) {
        best_gain = g;
        best = &c;
      }
    }
    if (best == nullptr || !(best_gain > cfg_.min_gain + kGainTolerance)) {
      return id;
    }
    const SplitCandidate chosen = *best;
    partition_rows(x_, rows, chosen, left, right);
    RowIndices right_rows = std::move(right);
    const int l = grow(left, depth + 1);
    const int r = grow(right_rows, depth + 1);
    Tree::Node& node = nodes_[id];
    node.feature = static_cast<int>(chosen.feature);
    node.threshold = chosen.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<Tree::Node> take() { return std::move(nodes_); }

 private:
  const ExperimentDataset& d_;
  const FeatureMatrix& x_;
  SplitRule& rule_;
  const FitConfig& cfg_;
  std::vector<Tree::Node> nodes_;
};

}  // namespace

Tree grow_tree(const ExperimentDataset& d, const FeatureMatrix& x,
               std::span<const std::size_t> rows, SplitRule& rule,
               const FitConfig& cfg) {
  cfg.validate();
  if (x.rows() != d.size()) throw Error("feature matrix row mismatch");
  std::size_t treated = 0;
  for (std::size_t i : rows) treated += d.treatment()[i];
  const std::size_t control = rows.size() - treated;
  if (rows.empty() || rows.size() < static_cast<std::size_t>(cfg.min_leaf) ||
      treated < static_cast<std::size_t>(cfg.min_arm) ||
      control < static_cast<std::size_t>(cfg.min_arm)) {
    throw Error("grow_tree: root has " + std::to_string(rows.size()) +
                " rows (" + std::to_string(treated) + " treated, " +
                std::to_string(control) + " control); need min_leaf=" +
                std::to_string(cfg.min_leaf) +
                ", min_arm=" + std::to_string(cfg.min_arm));
  }
  TreeGrower grower(d, x, rule, cfg);
  grower.grow(RowIndices(rows.begin(), rows.end()), 0);
  return Tree(grower.take());
}

RowIndices all_rows(std::size_t n) {
  RowIndices rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

}  // namespace cft
