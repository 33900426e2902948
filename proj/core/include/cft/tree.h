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

// Greedy binary-tree induction with pluggable leaf payload and split gain.
// Shared by the effect-estimation, effect-classification and causal-tree
// learners; the effect-ordering stumps reuse the split enumeration.

#ifndef CFT_TREE_H_
#define CFT_TREE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cft/dataset.h"

namespace cft {

struct FitConfig {
  int max_depth = 4;
  int min_leaf = 50;
  int min_arm = 10;  // treated and control rows required in every child
  int n_split_quantiles = 32;
  double min_gain = 0.0;
  int m = 10;  // AUUC levels
  int n_trees = 10;
  double min_split_fraction = 0.4;
  int bucket_groups = 100;  // 0 disables bucketing
  double epsilon = 1e-6;
  double treatment_cost = 0.0;
  std::uint64_t seed = 0;

  // Throws Error on out-of-range fields.
  void validate() const;
};

// Feature columns seen by a learner: the dataset's features, optionally
// followed by one extra score column (index == num dataset features).
class FeatureMatrix {
 public:
  FeatureMatrix(const ExperimentDataset& d, const ScoreVector* score_column);
  FeatureMatrix(std::size_t rows, std::vector<double> column_major);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double at(std::size_t row, std::size_t col) const {
    return data_[col * rows_ + row];
  }
  std::span<const double> column(std::size_t col) const {
    return {data_.data() + col * rows_, rows_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Rows with feature value <= threshold go left.
struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;

  bool operator==(const SplitCandidate&) const = default;
};

// Flat binary tree; node 0 is the root.
class Tree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double payload = 0.0;
    std::size_t n_rows = 0;

    bool is_leaf() const { return feature < 0; }
  };

  Tree() = default;
  explicit Tree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<Node>& nodes() const { return nodes_; }
  std::vector<Node>& mutable_nodes() { return nodes_; }
  std::size_t num_leaves() const;
  int depth() const;

  int leaf_index(const FeatureMatrix& x, std::size_t row) const;
  double predict(const FeatureMatrix& x, std::size_t row) const {
    return nodes_[leaf_index(x, row)].payload;
  }

  bool operator==(const Tree& other) const;

 private:
  std::vector<Node> nodes_;
};

// Leaf payload and split gain for one learner.
class SplitRule {
 public:
  virtual ~SplitRule() = default;
  virtual double leaf_payload(std::span<const std::size_t> rows) const = 0;
  // Called once per node before its candidates are scored.
  virtual void begin_node(std::span<const std::size_t> /*parent*/) {}
  virtual double gain(std::span<const std::size_t> parent,
                      std::span<const std::size_t> left,
                      std::span<const std::size_t> right) const = 0;
};

// Child sizes that a candidate split must respect.
struct SplitConstraints {
  std::size_t min_leaf = 1;
  std::size_t min_arm = 0;
};

SplitConstraints constraints_from(const FitConfig& cfg);

// Candidate thresholds sit at midpoints between adjacent distinct values;
// columns with more than n_split_quantiles boundaries are thinned to the
// boundaries just above the empirical q/(Q+1) quantiles. Candidates whose
// children violate the constraints are dropped. Ordered by (feature,
// threshold).
std::vector<SplitCandidate> enumerate_splits(
    const ExperimentDataset& d, const FeatureMatrix& x,
    std::span<const std::size_t> rows, int n_split_quantiles,
    const SplitConstraints& constraints);

// Splits `rows` into (left, right) preserving order.
void partition_rows(const FeatureMatrix& x, std::span<const std::size_t> rows,
                    const SplitCandidate& split, RowIndices& left,
                    RowIndices& right);

// Greedy depth-first growth. A node splits on the candidate with the largest
// gain when that gain exceeds cfg.min_gain by more than 1e-12 (round-off
// margin); equal gains keep the earlier
// candidate in enumeration order.
Tree grow_tree(const ExperimentDataset& d, const FeatureMatrix& x,
               std::span<const std::size_t> rows, SplitRule& rule,
               const FitConfig& cfg);

RowIndices all_rows(std::size_t n);

}  // namespace cft

#endif  // CFT_TREE_H_
