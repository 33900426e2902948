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

// Microbenchmarks for the hot paths: AUUC, the shift sweep and the learners.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "cft/effect_classification.h"
#include "cft/effect_estimation.h"
#include "cft/effect_ordering.h"
#include "cft/metrics.h"
#include "cft/simulation.h"

namespace {

cft::ExperimentDataset sample(std::size_t n) {
  cft::SimulationParams p;
  p.w = 20;
  p.w_e = 20;
  cft::Rng rng = cft::make_stream(7, 0);
  const auto g = cft::draw_dgp(p, rng);
  return cft::sample_population(g, n, rng).data;
}

void BM_Auuc(benchmark::State& state) {
  const auto d = sample(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(cft::auuc(d.base_score(), d, 10));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Auuc)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

void BM_FindOptimalShift(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = sample(n);
  std::vector<std::uint8_t> mask(n);
  for (std::size_t i = 0; i < n; ++i) mask[i] = i % 2;
  cft::FitConfig cfg;
  cfg.bucket_groups = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cft::find_optimal_shift(d.base_score(), mask, d, cfg));
  }
}
BENCHMARK(BM_FindOptimalShift)
    ->Args({2048, 0})
    ->Args({2048, 100})
    ->Args({8192, 0})
    ->Args({8192, 100});

template <typename Fit>
void run_fit(benchmark::State& state, Fit fit) {
  const auto d = sample(static_cast<std::size_t>(state.range(0)));
  cft::FitConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit(d, cfg));
}

void BM_FitEo(benchmark::State& state) { run_fit(state, cft::fit_eo); }
void BM_FitEe(benchmark::State& state) { run_fit(state, cft::fit_ee); }
void BM_FitEc(benchmark::State& state) { run_fit(state, cft::fit_ec); }
BENCHMARK(BM_FitEo)->Arg(512)->Arg(8192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitEe)->Arg(512)->Arg(8192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitEc)->Arg(512)->Arg(8192)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
