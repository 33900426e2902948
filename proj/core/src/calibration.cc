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

#include "cft/calibration.h"

#include <cmath>

namespace cft {

CalibrationParams fit_calibration(const ScoreVector& scores,
                                  const ExperimentDataset& d) {
  const std::size_t n = d.size();
  if (scores.size() != n) throw Error("fit_calibration: length mismatch");
  if (n < 2) throw Error("fit_calibration: needs at least two rows");
  const auto z = transformed_outcome(d);
  double mean_s = 0.0;
  double mean_z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_s += scores[i];
    mean_z += z[i];
  }
  mean_s /= static_cast<double>(n);
  mean_z /= static_cast<double>(n);
  double sxx = 0.0;
  double sxz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ds = scores[i] - mean_s;
    sxx += ds * ds;
    sxz += ds * (z[i] - mean_z);
  }
  CalibrationParams p;
  if (sxx == 0.0) {
    p.scale = 0.0;
    p.shift = mean_z;
  } else {
    p.scale = sxz / sxx;
    p.shift = mean_z - p.scale * mean_s;
  }
  if (!std::isfinite(p.scale) || !std::isfinite(p.shift)) {
    throw Error("fit_calibration: non-finite fit");
  }
  return p;
}

ScoreVector apply_calibration(const CalibrationParams& p,
                              const ScoreVector& scores) {
  ScoreVector out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = p.scale * scores[i] + p.shift;
  }
  return out;
}

}  // namespace cft
