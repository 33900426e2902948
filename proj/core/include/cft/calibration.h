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

// Effect calibration: a single scale and shift mapping scores onto effects.

#ifndef CFT_CALIBRATION_H_
#define CFT_CALIBRATION_H_

#include "cft/dataset.h"

namespace cft {

struct CalibrationParams {
  double scale = 1.0;
  double shift = 0.0;

  bool operator==(const CalibrationParams&) const = default;
};

// Least-squares fit of the transformed outcome on the scores. Constant scores
// yield scale 0 and the Horvitz-Thompson effect estimate as shift.
CalibrationParams fit_calibration(const ScoreVector& scores,
                                  const ExperimentDataset& d);

ScoreVector apply_calibration(const CalibrationParams& p,
                              const ScoreVector& scores);

}  // namespace cft

#endif  // CFT_CALIBRATION_H_
