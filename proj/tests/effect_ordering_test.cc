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

#include <cmath>
#include <random>
#include <variant>
#include <vector>

#include "cft/calibration.h"
#include "cft/effect_ordering.h"
#include "cft/finetuner.h"
#include "cft/metrics.h"
#include "gtest/gtest.h"
#include "oracles.h"
#include "test_util.h"

namespace cft {
namespace {

using testing::make_dataset;
using testing::make_plain;

FitConfig exact_config(int m) {
  FitConfig c;
  c.m = m;
  c.bucket_groups = 0;
  return c;
}

ExperimentDataset random_instance(std::mt19937_64& rng, size_t n,
                                  bool ties) {
  testing::RandomDatasetOptions o;
  o.n = n;
  o.integer_outcomes = true;
  auto d = testing::random_dataset(rng, o);
  if (ties) {
    std::uniform_int_distribution<int> small(0, static_cast<int>(n / 3));
    ScoreVector s(n);
    for (auto& v : s) v = small(rng);
    d = d.with_base_score(s);
  }
  return d;
}

std::vector<std::uint8_t> random_mask(std::mt19937_64& rng, size_t n) {
  std::vector<std::uint8_t> mask(n);
  std::bernoulli_distribution coin(0.4);
  for (auto& v : mask) v = coin(rng);
  mask[0] = 1;
  mask[1] = 0;
  return mask;
}

TEST(FindOptimalShift, ZeroOutcomesKeepZero) {
  const auto d = make_plain({1, 0, 1, 0, 1, 0}, {0, 0, 0, 0, 0, 0},
                            {6, 5, 4, 3, 2, 1});
  const auto r =
      find_optimal_shift(d.base_score(), {0, 1, 0, 1, 1, 0}, d, exact_config(2));
  EXPECT_EQ(r.shift, 0.0);
  EXPECT_EQ(r.delta_auuc, 0.0);
}

TEST(FindOptimalShift, PromotesSingleRow) {
  const auto d = make_plain({1, 0, 1, 1, 0, 0}, {0, 0, 0, 1, 0, 0},
                            {6, 5, 4, 3, 2, 1});
  EXPECT_NEAR(auuc(d.base_score(), d, 2), 1.0 / 3.0, 1e-15);
  const std::vector<std::uint8_t> mask{0, 0, 0, 1, 0, 0};
  const auto cfg = exact_config(2);
  const auto r = find_optimal_shift(d.base_score(), mask, d, cfg);
  // epsilon is scaled by the score range (5).
  EXPECT_NEAR(r.shift, 1.0 + 5 * cfg.epsilon, 1e-12);
  EXPECT_NEAR(r.delta_auuc, 0.25, 1e-12);
  EXPECT_NEAR(auuc(oracle::shifted(d.base_score(), mask, r.shift), d, 2),
              7.0 / 12.0, 1e-12);
  EXPECT_NEAR(oracle::best_shift_gain(d.base_score(), mask, d, 2), 0.25,
              1e-12);
}

TEST(FindOptimalShift, RightSideAlreadyOnTop) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = random_instance(rng, 20, false);
    std::vector<std::uint8_t> mask(20);
    for (size_t i = 0; i < 20; ++i) {
      mask[i] = d.base_score()[i] >= 0.0 ? 1 : 0;
    }
    if (std::count(mask.begin(), mask.end(), 1) % 20 == 0) continue;
    const auto r = find_optimal_shift(d.base_score(), mask, d, exact_config(4));
    EXPECT_LE(r.shift, 0.0);
    EXPECT_GE(r.delta_auuc, 0.0);
    if (oracle::best_shift_gain(d.base_score(), mask, d, 4) <= 1e-12) {
      EXPECT_EQ(r.shift, 0.0);
    }
  }
}

TEST(FindOptimalShift, BothSidesRequired) {
  const auto d = make_plain({1, 0}, {1, 0}, {1, 2});
  EXPECT_THROW(find_optimal_shift(d.base_score(), {1, 1}, d, exact_config(2)),
               Error);
}

// Each trace entry's cumulative change equals a from-scratch recount.
TEST(FindOptimalShift, IncrementalMatchesRecount) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 6 + trial % 45;
    const auto d = random_instance(rng, n, trial % 2 == 0);
    const int m = 2 + trial % 4;
    const auto mask = random_mask(rng, n);
    std::vector<ShiftTraceEntry> trace;
    const auto r =
        find_optimal_shift(d.base_score(), mask, d, exact_config(m), &trace);
    const double base = auuc(d.base_score(), d, m);
    double best = 0.0;
    for (const auto& e : trace) {
      const double fresh =
          auuc(oracle::shifted(d.base_score(), mask, e.shift), d, m) - base;
      ASSERT_NEAR(e.cumulative_delta, fresh, 1e-9) << "trial " << trial;
      best = std::max(best, fresh);
    }
    EXPECT_NEAR(r.delta_auuc, best, 1e-9);
    EXPECT_GE(r.delta_auuc, 0.0);
    EXPECT_NEAR(r.delta_auuc,
                auuc(oracle::shifted(d.base_score(), mask, r.shift), d, m) -
                    base,
                1e-9);
  }
}

TEST(FindOptimalShift, MatchesBruteForceOptimum) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const size_t n = 6 + trial % 25;
    const auto d = random_instance(rng, n, trial % 3 == 0);
    const int m = 2 + trial % 4;
    const auto mask = random_mask(rng, n);
    const auto r = find_optimal_shift(d.base_score(), mask, d, exact_config(m));
    EXPECT_NEAR(r.delta_auuc,
                oracle::best_shift_gain(d.base_score(), mask, d, m), 1e-9)
        << "trial " << trial;
  }
}

TEST(FindOptimalShift, SingletonBucketsMatchExactSearch) {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 30; ++trial) {
    const size_t n = 10 + trial;
    const auto d = random_instance(rng, n, trial % 2 == 0);
    const auto mask = random_mask(rng, n);
    auto exact = exact_config(3);
    auto bucketed = exact;
    bucketed.bucket_groups = static_cast<int>(n + trial % 3);
    const auto a = find_optimal_shift(d.base_score(), mask, d, exact);
    const auto b = find_optimal_shift(d.base_score(), mask, d, bucketed);
    EXPECT_EQ(a.shift, b.shift);
    EXPECT_EQ(a.delta_auuc, b.delta_auuc);
  }
}

TEST(FindOptimalShift, BucketedSearchStaysConsistent) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = random_instance(rng, 400, false);
    const auto mask = random_mask(rng, 400);
    FitConfig cfg;
    cfg.bucket_groups = 20;
    const auto r = find_optimal_shift(d.base_score(), mask, d, cfg);
    EXPECT_GE(r.delta_auuc, 0.0);
    if (r.delta_auuc == 0.0) EXPECT_EQ(r.shift, 0.0);
  }
}

TEST(FitEoStump, ZeroOutcomesGiveNullStump) {
  std::mt19937_64 rng(56);
  auto d = random_instance(rng, 40, false);
  d = make_dataset({}, d.treatment(), std::vector<double>(40, 0.0),
                   d.base_score());
  const FeatureMatrix x(d, &d.base_score());
  const auto r = fit_eo_stump(d.base_score(), d, x, exact_config(4));
  EXPECT_TRUE(r.stump.is_null());
  EXPECT_EQ(r.delta_auuc, 0.0);
}

TEST(FitEoStump, PromotesUnderRankedGroup) {
  // x0 = 1 rows have a large effect but middling base scores.
  std::vector<std::vector<double>> rows;
  std::vector<int> t;
  std::vector<double> y, b;
  for (int i = 0; i < 40; ++i) {
    const int x0 = i % 2;
    rows.push_back({static_cast<double>(x0)});
    t.push_back((i / 2) % 2);
    const double effect = x0 == 1 ? 5.0 : 0.1 * (i % 10);
    y.push_back(t.back() * effect);
    b.push_back(x0 == 1 ? 10 + 0.01 * i : i);
  }
  const auto d = make_dataset(rows, t, y, b);
  const FeatureMatrix x(d, nullptr);
  const auto cfg = exact_config(4);
  const auto r = fit_eo_stump(d.base_score(), d, x, cfg);
  ASSERT_FALSE(r.stump.is_null());
  EXPECT_EQ(r.stump.feature, 0u);
  EXPECT_GT(r.stump.shift, 0.0);
  EXPECT_GT(r.delta_auuc, 0.0);
  std::vector<std::uint8_t> mask(40);
  for (int i = 0; i < 40; ++i) mask[i] = i % 2;
  EXPECT_NEAR(r.delta_auuc, oracle::best_shift_gain(d.base_score(), mask, d, 4),
              1e-12);
}

TEST(FitEoStump, MatchesExhaustiveSplitAndShiftScan) {
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 20; ++trial) {
    const size_t n = 20 + trial % 10;
    const auto d = random_instance(rng, n, trial % 2 == 1);
    const FeatureMatrix x(d, &d.base_score());
    auto cfg = exact_config(2 + trial % 3);
    const auto r = fit_eo_stump(d.base_score(), d, x, cfg);
    const auto cols = std::vector<std::vector<double>>{
        {d.column(0).begin(), d.column(0).end()},
        {d.column(1).begin(), d.column(1).end()},
        {d.column(2).begin(), d.column(2).end()},
        d.base_score()};
    const auto min_leaf =
        static_cast<size_t>(std::ceil(cfg.min_split_fraction * n));
    double best = 0.0;
    for (const auto& s : oracle::splits(cols, d, all_rows(n), min_leaf, 0)) {
      std::vector<std::uint8_t> mask(n);
      for (size_t i = 0; i < n; ++i) mask[i] = cols[s.feature][i] > s.threshold;
      best = std::max(best,
                      oracle::best_shift_gain(d.base_score(), mask, d, cfg.m));
    }
    EXPECT_NEAR(r.delta_auuc, best, 1e-9) << "trial " << trial;
  }
}

TEST(FitEoStump, SingleBinaryFeatureHasOneCandidate) {
  std::mt19937_64 rng(58);
  for (int trial = 0; trial < 10; ++trial) {
    auto d = random_instance(rng, 30, false);
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < 30; ++i) rows.push_back({d.feature(i, 0)});
    d = make_dataset(rows, d.treatment(), d.outcome(), d.base_score());
    const FeatureMatrix x(d, nullptr);
    const auto r = fit_eo_stump(d.base_score(), d, x, exact_config(3));
    if (!r.stump.is_null()) {
      EXPECT_EQ(r.stump.feature, 0u);
      EXPECT_EQ(r.stump.threshold, 0.5);
    }
  }
}

const StumpsStage& stumps_of(const FineTuner& f) {
  return std::get<StumpsStage>(f.stages.at(0));
}

TEST(FitEo, NoTreesIsIdentityPlusCalibration) {
  std::mt19937_64 rng(59);
  const auto d = random_instance(rng, 50, false);
  auto cfg = exact_config(4);
  cfg.n_trees = 0;
  const auto f = fit_eo(d, cfg);
  EXPECT_TRUE(stumps_of(f).stumps.empty());
  const auto& cal = std::get<CalibrationStage>(f.stages.at(1)).params;
  EXPECT_EQ(cal, fit_calibration(d.base_score(), d));
  EXPECT_EQ(apply_finetuner(f, d), apply_calibration(cal, d.base_score()));
}

TEST(FitEo, NullFirstStumpStopsEarly) {
  std::mt19937_64 rng(60);
  auto d = random_instance(rng, 40, false);
  d = make_dataset({{0}, {1}}, {0, 1}, {0, 0}, {0, 1});
  auto cfg = exact_config(2);
  cfg.min_split_fraction = 0.5;
  EXPECT_TRUE(stumps_of(fit_eo(d, cfg)).stumps.empty());
}

TEST(FitEo, TrainingAuucNeverDecreases) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = random_instance(rng, 120, false);
    auto cfg = exact_config(5);
    if (trial % 2 == 1) cfg.bucket_groups = 30;
    const auto f = fit_eo(d, cfg);
    const FeatureMatrix x(d, &d.base_score());
    ScoreVector working = d.base_score();
    double previous = auuc(working, d, cfg.m);
    for (const auto& s : stumps_of(f).stumps) {
      for (size_t i = 0; i < d.size(); ++i) {
        if (s.contains(x.at(i, s.feature))) working[i] += s.shift;
      }
      const double now = auuc(working, d, cfg.m);
      EXPECT_GE(now, previous - 1e-12);
      previous = now;
    }
    EXPECT_LE(stumps_of(f).stumps.size(), static_cast<size_t>(cfg.n_trees));
  }
}

TEST(FitEo, SingletonBucketsReproduceExactFit) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = random_instance(rng, 60, trial % 2 == 0);
    auto exact = exact_config(4);
    auto bucketed = exact;
    bucketed.bucket_groups = 60;
    EXPECT_EQ(stumps_of(fit_eo(d, exact)).stumps,
              stumps_of(fit_eo(d, bucketed)).stumps);
  }
}

}  // namespace
}  // namespace cft
