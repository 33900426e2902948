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

// Fine-tuners: ordered scoring pipelines that turn base scores into causal
// scores, plus their JSON persistence.

#ifndef CFT_FINETUNER_H_
#define CFT_FINETUNER_H_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cft/calibration.h"
#include "cft/dataset.h"
#include "cft/tree.h"

namespace cft {

enum class FineTunerKind { kCalibrated, kEE, kEC, kEO, kCT, kCTBS };

std::string_view to_string(FineTunerKind kind);
FineTunerKind fine_tuner_kind_from_string(std::string_view name);

// One boosting stump: rows whose feature value is on `shifted_side` of the
// threshold get `shift` added to their score.
struct EOStump {
  enum class Side { kLeft, kRight };

  std::size_t feature = 0;
  double threshold = 0.0;
  Side shifted_side = Side::kRight;
  double shift = 0.0;

  bool contains(double feature_value) const {
    return shifted_side == Side::kRight ? feature_value > threshold
                                        : feature_value <= threshold;
  }
  bool is_null() const { return shift == 0.0; }
  bool operator==(const EOStump&) const = default;
};

struct CalibrationStage {
  CalibrationParams params;
};

// score <- score - tree(X), or score <- -tree(X) when replace_base is set.
// With uses_score_feature, the feature index one past the last named feature
// reads the score entering this stage.
struct TreeStage {
  Tree tree;
  bool replace_base = false;
  bool uses_score_feature = false;
};

// score <- score + sum of the shifts of every stump containing X. Stump
// regions read the score entering the stage, not the running sum.
struct StumpsStage {
  std::vector<EOStump> stumps;
  bool uses_score_feature = false;
};

using Stage = std::variant<CalibrationStage, TreeStage, StumpsStage>;

struct FineTuner {
  static constexpr int kSchemaVersion = 1;

  FineTunerKind kind = FineTunerKind::kCalibrated;
  std::vector<std::string> feature_names;
  std::vector<Stage> stages;
  FitConfig config;
};

// Calibration-only fine-tuner fitted on d's base scores.
FineTuner fit_calibrated(const ExperimentDataset& d);

// Runs every stage in order on d's base-score column. Feature columns are
// matched by name.
ScoreVector apply_finetuner(const FineTuner& f, const ExperimentDataset& d);

std::string finetuner_to_json(const FineTuner& f);
FineTuner finetuner_from_json(std::string_view text);
void save_model(const FineTuner& f, const std::string& path);
FineTuner load_model(const std::string& path);

}  // namespace cft

#endif  // CFT_FINETUNER_H_
