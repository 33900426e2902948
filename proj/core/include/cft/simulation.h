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

// Linear data-generating process for benchmark experiments: Bernoulli
// features, correlated baseline and effect coefficients, noiseless base
// scores equal to the expected baseline outcome.

#ifndef CFT_SIMULATION_H_
#define CFT_SIMULATION_H_

#include <cstdint>
#include <random>
#include <vector>

#include "cft/dataset.h"

namespace cft {

struct SimulationParams {
  int w = 50;    // features driving outcomes
  int w_e = 50;  // leading features exposed in the dataset
  double rho = 0.5;
  double sigma2_alpha = 1.0;
  double sigma2_beta = 1.0;
  double sigma2_y = 12.5;
  double sigma2_c = 12.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct DgpInstance {
  std::vector<double> alpha;      // baseline coefficients
  std::vector<double> beta_coef;  // effect coefficients
  SimulationParams params;
};

struct SimulatedSample {
  ExperimentDataset data;
  SimulatedTruth truth;
};

using Rng = std::mt19937_64;

// Independent generator for (seed, stream); streams never share state, so
// parallel replications reproduce sequential ones.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

// (alpha_j, beta_j) i.i.d. bivariate normal with correlation rho.
DgpInstance draw_dgp(const SimulationParams& p, Rng& rng);

// n rows with Bernoulli(0.5) features and treatment, correlated outcome
// noise, and ground truth. Base scores use all w features; the dataset
// exposes the first w_e.
SimulatedSample sample_population(const DgpInstance& g, std::size_t n,
                                  Rng& rng);

}  // namespace cft

#endif  // CFT_SIMULATION_H_
