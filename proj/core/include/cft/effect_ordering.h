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

// Effect-ordering fine-tuning: boosted single-split stumps, each shifting the
// scores of one side of a split by the amount that most improves the
// level-based AUUC.
//
// The shift search moves every right-side unit relative to the left side and
// processes the resulting crossings in order of the shift that causes them.
// A unit is a bucket of rows: rows of the same percentile group
// (bucket_groups groups, defined like AUUC levels) on the same side, scored
// by their mean. With bucket_groups == 0 or >= n every unit is a set of rows
// with identical score and side, so the search is exact for individual rows.
// Each crossing changes the levels of at most the two units involved, and
// the AUUC change is obtained from the cumulative level tables without a
// full recount.

#ifndef CFT_EFFECT_ORDERING_H_
#define CFT_EFFECT_ORDERING_H_

#include <cstdint>
#include <vector>

#include "cft/dataset.h"
#include "cft/finetuner.h"
#include "cft/tree.h"

namespace cft {

struct ShiftResult {
  double shift = 0.0;
  double delta_auuc = 0.0;
};

// One entry per crossing batch that changed at least one level.
struct ShiftTraceEntry {
  double shift = 0.0;
  double cumulative_delta = 0.0;
};

// right_mask[i] != 0 marks the rows that receive the shift; the rest form the
// left side. Both sides must be nonempty. The returned shift realizes the
// best configuration found (0 included); ties keep the smaller |shift|, with
// positive shifts examined first.
ShiftResult find_optimal_shift(const ScoreVector& scores,
                               const std::vector<std::uint8_t>& right_mask,
                               const ExperimentDataset& d,
                               const FitConfig& cfg,
                               std::vector<ShiftTraceEntry>* trace = nullptr);

struct StumpResult {
  EOStump stump;
  double delta_auuc = 0.0;
};

// Best (split, shift) pair over candidate splits of `x` whose smaller side
// holds at least min_split_fraction of the rows. Returns a null stump when
// no candidate improves the AUUC.
StumpResult fit_eo_stump(const ScoreVector& scores, const ExperimentDataset& d,
                         const FeatureMatrix& x, const FitConfig& cfg);

// Up to n_trees stumps, each fitted on the scores left by its predecessors;
// stops at the first null stump. Split features are the dataset features
// plus the base score. Calibration is appended.
FineTuner fit_eo(const ExperimentDataset& d, const FitConfig& cfg);

}  // namespace cft

#endif  // CFT_EFFECT_ORDERING_H_
