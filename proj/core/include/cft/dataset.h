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

// Experimental datasets, simulated ground truth and CSV ingestion.

#ifndef CFT_DATASET_H_
#define CFT_DATASET_H_

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cft {

// Base exception for every recoverable error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ScoreVector = std::vector<double>;
using RowIndices = std::vector<std::size_t>;

// Rows of (features, treatment, outcome, base score) from a randomized
// experiment with a known, constant treatment propensity. Immutable after
// construction apart from `with_base_score`, which returns a copy.
class ExperimentDataset {
 public:
  ExperimentDataset() = default;

  // `features` is column-major: features[c * n + i] is row i, column c.
  ExperimentDataset(std::vector<std::string> feature_names,
                    std::vector<double> features, std::vector<int> treatment,
                    std::vector<double> outcome, std::vector<double> base_score,
                    double propensity_treated);

  std::size_t size() const { return outcome_.size(); }
  std::size_t num_features() const { return feature_names_.size(); }

  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  std::span<const double> column(std::size_t c) const {
    return {features_.data() + c * size(), size()};
  }
  double feature(std::size_t row, std::size_t c) const {
    return features_[c * size() + row];
  }
  const std::vector<double>& features_column_major() const {
    return features_;
  }
  const std::vector<int>& treatment() const { return treatment_; }
  const std::vector<double>& outcome() const { return outcome_; }
  const std::vector<double>& base_score() const { return base_score_; }
  double propensity_treated() const { return propensity_; }

  // Probability of the arm row `i` was assigned to.
  double arm_probability(std::size_t i) const {
    return treatment_[i] == 1 ? propensity_ : 1.0 - propensity_;
  }

  std::size_t treated_count() const;

  // Copy with the base-score column replaced.
  ExperimentDataset with_base_score(ScoreVector scores) const;

  // Copy restricted to `rows`, in the given order.
  ExperimentDataset subset(std::span<const std::size_t> rows) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<double> features_;
  std::vector<int> treatment_;
  std::vector<double> outcome_;
  std::vector<double> base_score_;
  double propensity_ = 0.5;
};

// Potential outcomes and conditional effects; only known for simulated data.
struct SimulatedTruth {
  std::vector<double> y0;
  std::vector<double> y1;
  std::vector<double> cate;

  std::size_t size() const { return cate.size(); }
  SimulatedTruth subset(std::span<const std::size_t> rows) const;
};

// Maps CSV column names to dataset roles. Every other column is a feature.
struct ColumnRoles {
  std::string treatment = "treatment";
  std::string outcome = "outcome";
  std::string score = "score";
};

ExperimentDataset load_dataset(std::istream& in, const ColumnRoles& roles,
                               double propensity_treated);
ExperimentDataset load_dataset_file(const std::string& path,
                                    const ColumnRoles& roles,
                                    double propensity_treated);

// Writes features first, then the three role columns, with shortest
// round-trip number formatting.
void save_dataset(std::ostream& out, const ExperimentDataset& d,
                  const ColumnRoles& roles);
void save_dataset_file(const std::string& path, const ExperimentDataset& d,
                       const ColumnRoles& roles);

// Sidecar truth CSV with columns y0,y1,cate.
SimulatedTruth load_truth(std::istream& in);
SimulatedTruth load_truth_file(const std::string& path);
void save_truth(std::ostream& out, const SimulatedTruth& truth);
void save_truth_file(const std::string& path, const SimulatedTruth& truth);

// Single-column score CSV (header "score").
ScoreVector load_scores_file(const std::string& path);
void save_scores_file(const std::string& path, const ScoreVector& scores);

// y*t/p1 - y*(1-t)/(1-p1); its conditional mean is the CATE under
// randomization.
std::vector<double> transformed_outcome(const ExperimentDataset& d);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace cft

#endif  // CFT_DATASET_H_
