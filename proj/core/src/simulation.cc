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

#include "cft/simulation.h"

#include <cmath>
#include <string>

namespace cft {
namespace {

// Pair of standard normals with correlation rho.
std::pair<double, double> correlated_normals(double rho, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double z1 = normal(rng);
  const double z2 = normal(rng);
  return {z1, rho * z1 + std::sqrt(1.0 - rho * rho) * z2};
}

}  // namespace

void SimulationParams::validate() const {
  auto fail = [](const std::string& what) {
    throw Error("invalid simulation params: " + what);
  };
  if (w < 1) fail("w must be >= 1");
  if (w_e < 0 || w_e > w) fail("w_e must lie in [0, w]");
  if (!(std::abs(rho) <= 1.0)) fail("|rho| must be <= 1");
  if (!(sigma2_alpha >= 0.0 && sigma2_beta >= 0.0 && sigma2_y >= 0.0 &&
        sigma2_c >= 0.0)) {
    fail("variances must be >= 0");
  }
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x5eedU};
  return Rng(seq);
}

DgpInstance draw_dgp(const SimulationParams& p, Rng& rng) {
  p.validate();
  DgpInstance g;
  g.params = p;
  g.alpha.resize(p.w);
  g.beta_coef.resize(p.w);
  const double sa = std::sqrt(p.sigma2_alpha);
  const double sb = std::sqrt(p.sigma2_beta);
  for (int j = 0; j < p.w; ++j) {
    const auto [za, zb] = correlated_normals(p.rho, rng);
    g.alpha[j] = sa * za;
    g.beta_coef[j] = sb * zb;
  }
  return g;
}

SimulatedSample sample_population(const DgpInstance& g, std::size_t n,
                                  Rng& rng) {
  const SimulationParams& p = g.params;
  p.validate();
  if (n < 1) throw Error("sample_population: n must be >= 1");
  const auto w = static_cast<std::size_t>(p.w);
  const auto w_e = static_cast<std::size_t>(p.w_e);
  const double sy = std::sqrt(p.sigma2_y);
  const double sc = std::sqrt(p.sigma2_c);

  std::vector<double> features(n * w_e);
  std::vector<int> treatment(n);
  std::vector<double> outcome(n);
  std::vector<double> base(n);
  SimulatedTruth truth;
  truth.y0.resize(n);
  truth.y1.resize(n);
  truth.cate.resize(n);
  std::vector<std::uint8_t> x(w);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < w; j += 64) {
      const std::uint64_t bits = rng();
      for (std::size_t b = 0; b < 64 && j + b < w; ++b) {
        x[j + b] = static_cast<std::uint8_t>((bits >> b) & 1U);
      }
    }
    double mu0 = 0.0;
    double effect = 0.0;
    for (std::size_t j = 0; j < w; ++j) {
      if (x[j] != 0) {
        mu0 += g.alpha[j];
        effect += g.beta_coef[j];
      }
    }
    for (std::size_t j = 0; j < w_e; ++j) features[j * n + i] = x[j];
    const auto [ey, ec] = correlated_normals(p.rho, rng);
    const double y0 = mu0 + sy * ey;
    const double y1 = y0 + effect + sc * ec;
    const int t = static_cast<int>(rng() & 1U);
    treatment[i] = t;
    outcome[i] = t == 1 ? y1 : y0;
    base[i] = mu0;
    truth.y0[i] = y0;
    truth.y1[i] = y1;
    truth.cate[i] = effect;
  }
  std::vector<std::string> names(w_e);
  for (std::size_t j = 0; j < w_e; ++j) names[j] = "x" + std::to_string(j);
  return {ExperimentDataset(std::move(names), std::move(features),
                            std::move(treatment), std::move(outcome),
                            std::move(base), 0.5),
          std::move(truth)};
}

}  // namespace cft
