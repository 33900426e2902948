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

#include <random>
#include <variant>
#include <vector>

#include "cft/effect_classification.h"
#include "cft/finetuner.h"
#include "cft/metrics.h"
#include "gtest/gtest.h"
#include "split_checks.h"
#include "test_util.h"

namespace cft {
namespace {

using testing::make_dataset;
using testing::make_plain;

const Tree& ec_tree(const FineTuner& f) {
  return std::get<TreeStage>(f.stages.at(0)).tree;
}

FitConfig small_config() {
  FitConfig c;
  c.min_leaf = 6;
  c.min_arm = 1;
  c.max_depth = 3;
  c.n_split_quantiles = 1000;
  return c;
}

TEST(FindOptimalThreshold, AlgorithmExample) {
  const auto d = make_plain({0, 1, 1}, {5, 4, 0}, {1, 2, 3});
  const auto r = find_optimal_threshold(d, all_rows(3), FitConfig{});
  EXPECT_EQ(r.boundary, 1.0);
  EXPECT_DOUBLE_EQ(r.value, 6.0);
  EXPECT_EQ(r.treated, 2u);
}

TEST(FindOptimalThreshold, ZeroOutcomesTreatNobody) {
  const auto pos = make_plain({0, 1, 1}, {0, 0, 0}, {1, 2, 3});
  auto r = find_optimal_threshold(pos, all_rows(3), FitConfig{});
  EXPECT_EQ(r.treated, 0u);
  EXPECT_EQ(r.value, 0.0);
  // Nobody has a score above the top score.
  EXPECT_EQ(r.boundary, 3.0);
  const auto neg = make_plain({0, 1, 1}, {0, 0, 0}, {-1, -2, -3});
  r = find_optimal_threshold(neg, all_rows(3), FitConfig{});
  EXPECT_EQ(r.boundary, 0.0);
}

TEST(FindOptimalThreshold, SingleRow) {
  FitConfig cfg;
  const auto pos = make_plain({1}, {1}, {2.5});
  auto r = find_optimal_threshold(pos, all_rows(1), cfg);
  EXPECT_EQ(r.treated, 1u);
  EXPECT_DOUBLE_EQ(r.value, 2.0);
  EXPECT_EQ(r.boundary, 0.0);
  const auto neg = make_plain({1}, {1}, {-2.5});
  r = find_optimal_threshold(neg, all_rows(1), cfg);
  EXPECT_LT(r.boundary, -2.5);
  EXPECT_NEAR(r.boundary, -2.5 - cfg.epsilon, 1e-12);
}

// Classification and value equal the exhaustive scan.
TEST(FindOptimalThreshold, MatchesExhaustiveScan) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> small(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    testing::RandomDatasetOptions o;
    o.n = 1 + trial % 25;
    o.p1 = 0.2 + 0.006 * trial;
    o.integer_outcomes = trial % 2 == 0;
    auto d = testing::random_dataset(rng, o);
    if (trial % 3 == 0) {
      ScoreVector s(d.size());
      for (auto& v : s) v = small(rng);
      d = d.with_base_score(s);
    }
    FitConfig cfg;
    cfg.treatment_cost = (trial % 4) * 0.25;
    const auto rows = all_rows(d.size());
    const auto got = find_optimal_threshold(d, rows, cfg);
    const auto want = oracle::best_threshold(d, rows, cfg.treatment_cost);
    EXPECT_NEAR(got.value, want.value, 1e-9);
    for (size_t i = 0; i < d.size(); ++i) {
      EXPECT_EQ(d.base_score()[i] > got.boundary ? 1 : 0, want.actions[i]);
    }
  }
}

TEST(EcSplitGain, Examples) {
  // Treatment helps when x0 = 1 and hurts when x0 = 0; base scores are
  // uninformative.
  std::vector<std::vector<double>> rows;
  std::vector<int> t;
  std::vector<double> y;
  for (int i = 0; i < 16; ++i) {
    const int x0 = i / 8, ti = i % 2;
    rows.push_back({static_cast<double>(x0)});
    t.push_back(ti);
    y.push_back(ti == 1 ? (x0 == 1 ? 3.0 : 0.0) : 1.0);
  }
  const auto d = make_dataset(rows, t, y, std::vector<double>(16, 1.0));
  const auto all = all_rows(16);
  RowIndices l(all.begin(), all.begin() + 8), r(all.begin() + 8, all.end());
  FitConfig cfg;
  const double g = ec_split_gain(d, all, l, r, cfg);
  EXPECT_GT(g, 0.0);
  EXPECT_NEAR(g, oracle::ec_gain(d, 0.0, all, l, r), 1e-12);

  const auto z = make_dataset(rows, t, std::vector<double>(16, 0.0),
                              std::vector<double>(16, 1.0));
  EXPECT_EQ(ec_split_gain(z, all, l, r, cfg), 0.0);
}

TEST(EcSplitGain, NeverNegative) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    testing::RandomDatasetOptions o;
    o.n = 30;
    const auto d = testing::random_dataset(rng, o);
    const auto all = all_rows(d.size());
    RowIndices l, r;
    for (size_t i : all) ((i * 7 + trial) % 3 == 0 ? l : r).push_back(i);
    EXPECT_GE(ec_split_gain(d, all, l, r, FitConfig{}), -1e-12);
  }
}

TEST(FitEc, DepthZeroIsGlobalClassifier) {
  std::mt19937_64 rng(43);
  testing::RandomDatasetOptions o;
  o.n = 60;
  const auto d = testing::random_dataset(rng, o);
  auto cfg = small_config();
  cfg.max_depth = 0;
  const auto f = fit_ec(d, cfg);
  ASSERT_EQ(ec_tree(f).num_leaves(), 1u);
  EXPECT_EQ(ec_tree(f).nodes()[0].payload,
            find_optimal_threshold(d, all_rows(d.size()), cfg).boundary);
}

TEST(FitEc, SplitsOnSeparatingFeature) {
  std::vector<std::vector<double>> rows;
  std::vector<int> t;
  std::vector<double> y, b;
  for (int i = 0; i < 40; ++i) {
    const int x0 = (i / 2) % 2, ti = i % 2;
    rows.push_back({static_cast<double>(x0), static_cast<double>(i % 5 == 0)});
    t.push_back(ti);
    y.push_back(ti == 1 ? (x0 == 1 ? 3.0 : 0.0) : 1.0);
    b.push_back(0.1 * (i % 7));
  }
  const auto d = make_dataset(rows, t, y, b);
  auto cfg = small_config();
  cfg.max_depth = 1;
  const auto f = fit_ec(d, cfg);
  const auto& tree = ec_tree(f);
  ASSERT_EQ(tree.nodes().size(), 3u);
  EXPECT_EQ(tree.nodes()[0].feature, 0);
  const FeatureMatrix x(d, &d.base_score());
  for (int child : {tree.nodes()[0].left, tree.nodes()[0].right}) {
    RowIndices leaf;
    for (size_t i = 0; i < d.size(); ++i) {
      if (tree.leaf_index(x, i) == child) leaf.push_back(i);
    }
    const auto want = oracle::best_threshold(d, leaf, 0.0);
    for (size_t k = 0; k < leaf.size(); ++k) {
      EXPECT_EQ(d.base_score()[leaf[k]] > tree.nodes()[child].payload ? 1 : 0,
                want.actions[k]);
    }
  }
}

TEST(FitEc, PerfectScoresKeepBoundaryZero) {
  std::vector<std::vector<double>> rows;
  std::vector<int> t;
  std::vector<double> y, b;
  for (int i = 0; i < 40; ++i) {
    const double effect = (i / 2) % 2 == 0 ? 2.0 : -2.0;
    rows.push_back({static_cast<double>(i % 3 == 0)});
    t.push_back(i % 2);
    y.push_back(t.back() * effect);
    b.push_back(effect * (1 + 0.01 * (i / 2)));
  }
  const auto d = make_dataset(rows, t, y, b);
  auto cfg = small_config();
  cfg.max_depth = 2;
  const auto f = fit_ec(d, cfg);
  ASSERT_EQ(ec_tree(f).num_leaves(), 1u);
  EXPECT_EQ(ec_tree(f).nodes()[0].payload, 0.0);
}

TEST(FitEc, InvariantsOnRandomFits) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 15; ++trial) {
    testing::RandomDatasetOptions o;
    o.n = 60;
    const auto d = testing::random_dataset(rng, o);
    const auto cfg = small_config();
    const auto f = fit_ec(d, cfg);
    const auto& tree = ec_tree(f);
    const auto cols = oracle::columns_with_score(d, d.base_score());
    EXPECT_EQ(oracle::check_tree(tree, cols, d, cfg,
                                 [&](const auto& p, const auto& l,
                                     const auto& r) {
                                   return oracle::ec_gain(d, 0.0, p, l, r);
                                 }),
              "");
    const FeatureMatrix x(d, &d.base_score());
    std::vector<RowIndices> leaves(tree.nodes().size());
    for (size_t i = 0; i < d.size(); ++i) {
      const int leaf = tree.leaf_index(x, i);
      leaves[leaf].push_back(i);
      const double tuned = d.base_score()[i] - tree.nodes()[leaf].payload;
      EXPECT_EQ(tuned > 0, d.base_score()[i] > tree.nodes()[leaf].payload);
    }
    for (size_t id = 0; id < leaves.size(); ++id) {
      if (leaves[id].empty()) continue;
      const auto want = oracle::best_threshold(d, leaves[id], 0.0);
      for (size_t k = 0; k < leaves[id].size(); ++k) {
        EXPECT_EQ(d.base_score()[leaves[id][k]] > tree.nodes()[id].payload,
                  want.actions[k] == 1);
      }
    }
  }
}

TEST(FitEc, InSampleValueGrowsWithDepth) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    testing::RandomDatasetOptions o;
    o.n = 120;
    const auto d = testing::random_dataset(rng, o);
    double previous = -1e300;
    for (int depth = 0; depth <= 4; ++depth) {
      auto cfg = small_config();
      cfg.max_depth = depth;
      const auto f = fit_ec(d, cfg);
      const auto& tree = ec_tree(f);
      const FeatureMatrix x(d, &d.base_score());
      std::vector<int> a(d.size());
      for (size_t i = 0; i < d.size(); ++i) {
        a[i] = d.base_score()[i] > tree.predict(x, i);
      }
      const double v = policy_value(a, d, {});
      EXPECT_GE(v, previous - 1e-9);
      previous = v;
    }
  }
}

}  // namespace
}  // namespace cft
