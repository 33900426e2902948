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

#include "cft/effect_ordering.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "cft/metrics.h"

namespace cft {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool improves(double candidate, double incumbent) {
  return candidate > incumbent + 1e-12 * (1.0 + std::abs(incumbent));
}

struct Unit {
  double score = 0.0;
  std::size_t size = 0;
  std::array<double, 2> count{0.0, 0.0};
  std::array<double, 2> sum{0.0, 0.0};
  std::size_t below = 0;  // rows in units ranked strictly below
  int level = 0;
};

// Cumulative N(r, t) and R(r, t) tables over levels >= r.
class LevelTables {
 public:
  LevelTables(int m, std::size_t n) : m_(m), n_(n), count_(m), sum_(m) {}

  int level_for(std::size_t below) const {
    return static_cast<int>((static_cast<std::size_t>(m_) * below) / n_);
  }

  void rebuild(const std::vector<Unit>& a, const std::vector<Unit>& b) {
    for (int r = 0; r < m_; ++r) count_[r] = sum_[r] = {0.0, 0.0};
    for (const auto* units : {&a, &b}) {
      for (const Unit& u : *units) {
        for (int t = 0; t < 2; ++t) {
          count_[u.level][t] += u.count[t];
          sum_[u.level][t] += u.sum[t];
        }
      }
    }
    for (int r = m_ - 2; r >= 0; --r) {
      for (int t = 0; t < 2; ++t) {
        count_[r][t] += count_[r + 1][t];
        sum_[r][t] += sum_[r + 1][t];
      }
    }
  }

  double value(int r) const {
    if (count_[r][0] == 0.0 || count_[r][1] == 0.0) return 0.0;
    return sum_[r][1] / count_[r][1] - sum_[r][0] / count_[r][0];
  }

  double auuc() const {
    double acc = 0.0;
    for (int q = 1; q <= m_; ++q) {
      acc += (static_cast<double>(q) / m_) * value(m_ - q);
    }
    return acc;
  }

  double weight(int r) const { return static_cast<double>(m_ - r) / m_; }

  // Moves u's rows from level `from` to level `to`.
  void move(const Unit& u, int from, int to) {
    if (from == to) return;
    const double sign = to > from ? 1.0 : -1.0;
    for (int r = std::min(from, to) + 1; r <= std::max(from, to); ++r) {
      for (int t = 0; t < 2; ++t) {
        count_[r][t] += sign * u.count[t];
        sum_[r][t] += sign * u.sum[t];
      }
    }
  }

 private:
  int m_;
  std::size_t n_;
  std::vector<std::array<double, 2>> count_;
  std::vector<std::array<double, 2>> sum_;
};

// Units of both sides, each side sorted by score with distinct scores.
struct UnitSet {
  std::vector<Unit> left;
  std::vector<Unit> right;
};

std::vector<Unit> merge_equal_scores(std::vector<Unit> units) {
  std::sort(units.begin(), units.end(),
            [](const Unit& a, const Unit& b) { return a.score < b.score; });
  std::vector<Unit> out;
  for (const Unit& u : units) {
    if (!out.empty() && out.back().score == u.score) {
      Unit& v = out.back();
      v.size += u.size;
      for (int t = 0; t < 2; ++t) {
        v.count[t] += u.count[t];
        v.sum[t] += u.sum[t];
      }
    } else {
      out.push_back(u);
    }
  }
  return out;
}

UnitSet build_units(const ScoreVector& scores, const std::vector<int>& group,
                    int n_groups, const std::vector<std::uint8_t>& right_mask,
                    const ExperimentDataset& d) {
  const std::size_t slots = static_cast<std::size_t>(n_groups) * 2;
  std::vector<Unit> acc(slots);
  std::vector<double> score_sum(slots, 0.0);
  std::vector<double> lo(slots, kInf);
  std::vector<double> hi(slots, -kInf);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::size_t k = static_cast<std::size_t>(group[i]) * 2 +
                          (right_mask[i] != 0 ? 1 : 0);
    Unit& u = acc[k];
    const int t = d.treatment()[i];
    u.size += 1;
    u.count[t] += 1.0;
    u.sum[t] += d.outcome()[i];
    score_sum[k] += scores[i];
    lo[k] = std::min(lo[k], scores[i]);
    hi[k] = std::max(hi[k], scores[i]);
  }
  UnitSet set;
  for (std::size_t k = 0; k < slots; ++k) {
    if (acc[k].size == 0) continue;
    acc[k].score = lo[k] == hi[k]
                       ? lo[k]
                       : score_sum[k] / static_cast<double>(acc[k].size);
    (k % 2 == 1 ? set.right : set.left).push_back(acc[k]);
  }
  set.left = merge_equal_scores(std::move(set.left));
  set.right = merge_equal_scores(std::move(set.right));
  return set;
}

// Rows ranked strictly below each unit. With dir == 0 cross-side ties share
// a rank; dir == +1 (-1) places tied right units just above (below) their
// left counterparts, the order an infinitesimal shift produces.
void assign_below(UnitSet& s, int dir) {
  struct Ref {
    double score;
    int order;  // tie-break among cross-side ties
    Unit* unit;
  };
  std::vector<Ref> all;
  all.reserve(s.left.size() + s.right.size());
  for (Unit& u : s.left) all.push_back({u.score, dir == -1 ? 1 : 0, &u});
  for (Unit& u : s.right) all.push_back({u.score, dir == 1 ? 1 : 0, &u});
  std::sort(all.begin(), all.end(), [](const Ref& a, const Ref& b) {
    return a.score != b.score ? a.score < b.score : a.order < b.order;
  });
  std::size_t prefix = 0;
  std::size_t p = 0;
  while (p < all.size()) {
    std::size_t q = p;
    std::size_t block = 0;
    while (q < all.size() && all[q].score == all[p].score &&
           all[q].order == all[p].order) {
      all[q].unit->below = prefix;
      block += all[q].unit->size;
      ++q;
    }
    prefix += block;
    p = q;
  }
}

void assign_levels(UnitSet& s, const LevelTables& tables) {
  for (auto* side : {&s.left, &s.right}) {
    for (Unit& u : *side) u.level = tables.level_for(u.below);
  }
}

struct SweepState {
  double best_delta = 0.0;
  double best_shift = 0.0;
  std::vector<ShiftTraceEntry>* trace = nullptr;
};

// Slides the right units in direction `dir` across every left unit,
// accumulating the AUUC change relative to the unshifted configuration.
void sweep(UnitSet s, int dir, int m, std::size_t n, double base_auuc,
           double eps, SweepState& state) {
  LevelTables tables(m, n);
  assign_below(s, dir);
  assign_levels(s, tables);
  tables.rebuild(s.left, s.right);

  // (gap, order, right unit). Equal gaps can arise from rounding; the unit
  // nearest the left side must cross first or the swap is not adjacent.
  using Event = std::tuple<double, std::size_t, std::size_t>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  // next_left[j]: index of the left unit right unit j crosses next.
  std::vector<std::ptrdiff_t> next_left(s.right.size());
  const auto& left = s.left;
  auto push_event = [&](std::size_t j) {
    const std::ptrdiff_t k = next_left[j];
    if (k < 0 || k >= static_cast<std::ptrdiff_t>(left.size())) return;
    const double gap = dir > 0 ? left[k].score - s.right[j].score
                               : s.right[j].score - left[k].score;
    events.emplace(gap, dir > 0 ? s.right.size() - 1 - j : j, j);
  };
  for (std::size_t j = 0; j < s.right.size(); ++j) {
    const double sj = s.right[j].score;
    if (dir > 0) {
      next_left[j] = std::upper_bound(left.begin(), left.end(), sj,
                                      [](double v, const Unit& u) {
                                        return v < u.score;
                                      }) -
                     left.begin();
    } else {
      next_left[j] = (std::lower_bound(left.begin(), left.end(), sj,
                                       [](const Unit& u, double v) {
                                         return u.score < v;
                                       }) -
                      left.begin()) -
                     1;
    }
    push_event(j);
  }

  auto record = [&](double gap, double cumulative) {
    const double next = events.empty() ? kInf : std::get<0>(events.top());
    const double step = std::min(eps, (next - gap) / 2.0);
    const double shift = dir * (gap + step);
    if (state.trace != nullptr) state.trace->push_back({shift, cumulative});
    if (improves(cumulative, state.best_delta)) {
      state.best_delta = cumulative;
      state.best_shift = shift;
    }
  };

  double cumulative = tables.auuc() - base_auuc;
  {
    // Cross-side ties already separated by the infinitesimal start shift.
    UnitSet exact = s;
    assign_below(exact, 0);
    assign_levels(exact, tables);
    bool moved = false;
    for (std::size_t j = 0; j < s.right.size(); ++j) {
      moved |= s.right[j].level != exact.right[j].level;
    }
    for (std::size_t i = 0; i < s.left.size(); ++i) {
      moved |= s.left[i].level != exact.left[i].level;
    }
    if (moved) record(0.0, cumulative);
  }

  std::vector<double> saved(m);
  double last_gap = 0.0;
  while (!events.empty()) {
    const double gap = std::get<0>(events.top());
    if (gap < last_gap) throw std::logic_error("shift events out of order");
    last_gap = gap;
    bool changed = false;
    while (!events.empty() && std::get<0>(events.top()) == gap) {
      const std::size_t j = std::get<2>(events.top());
      events.pop();
      Unit& r_unit = s.right[j];
      Unit& l_unit = s.left[static_cast<std::size_t>(next_left[j])];
      // The crossing units must be adjacent in the current ranking.
      const bool adjacent = dir > 0
                                ? l_unit.below == r_unit.below + r_unit.size
                                : r_unit.below == l_unit.below + l_unit.size;
      if (!adjacent) throw std::logic_error("non-adjacent shift swap");
      if (dir > 0) {
        r_unit.below += l_unit.size;
        l_unit.below -= r_unit.size;
      } else {
        r_unit.below -= l_unit.size;
        l_unit.below += r_unit.size;
      }
      const int r_new = tables.level_for(r_unit.below);
      const int l_new = tables.level_for(l_unit.below);
      if (r_new != r_unit.level || l_new != l_unit.level) {
        const int lo = std::min({r_new, r_unit.level, l_new, l_unit.level});
        const int hi = std::max({r_new, r_unit.level, l_new, l_unit.level});
        for (int r = lo + 1; r <= hi; ++r) saved[r] = tables.value(r);
        tables.move(r_unit, r_unit.level, r_new);
        tables.move(l_unit, l_unit.level, l_new);
        r_unit.level = r_new;
        l_unit.level = l_new;
        double delta_u = 0.0;
        for (int r = lo + 1; r <= hi; ++r) {
          delta_u += tables.weight(r) * (tables.value(r) - saved[r]);
        }
        cumulative += delta_u;
        changed = true;
      }
      next_left[j] += dir;
      push_event(j);
    }
    if (changed) record(gap, cumulative);
  }
}

int effective_groups(const FitConfig& cfg, std::size_t n) {
  if (cfg.bucket_groups == 0 ||
      static_cast<std::size_t>(cfg.bucket_groups) >= n) {
    return static_cast<int>(n);
  }
  return cfg.bucket_groups;
}

double scaled_epsilon(const ScoreVector& scores, double epsilon) {
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double range = *hi - *lo;
  return epsilon * (range > 0.0 ? range : 1.0);
}

ShiftResult search(const ScoreVector& scores, const std::vector<int>& group,
                   int n_groups, const std::vector<std::uint8_t>& right_mask,
                   const ExperimentDataset& d, int m, double eps,
                   std::vector<ShiftTraceEntry>* trace) {
  UnitSet units = build_units(scores, group, n_groups, right_mask, d);
  if (units.left.empty() || units.right.empty()) {
    throw Error("find_optimal_shift: both sides must be nonempty");
  }
  const std::size_t n = scores.size();
  LevelTables tables(m, n);
  {
    UnitSet exact = units;
    assign_below(exact, 0);
    assign_levels(exact, tables);
    tables.rebuild(exact.left, exact.right);
  }
  const double base = tables.auuc();
  SweepState state;
  state.trace = trace;
  sweep(units, +1, m, n, base, eps, state);
  sweep(std::move(units), -1, m, n, base, eps, state);
  return {state.best_shift, state.best_delta};
}

}  // namespace

ShiftResult find_optimal_shift(const ScoreVector& scores,
                               const std::vector<std::uint8_t>& right_mask,
                               const ExperimentDataset& d,
                               const FitConfig& cfg,
                               std::vector<ShiftTraceEntry>* trace) {
  cfg.validate();
  if (scores.size() != d.size() || right_mask.size() != d.size()) {
    throw Error("find_optimal_shift: length mismatch");
  }
  const int groups = effective_groups(cfg, d.size());
  return search(scores, rank_levels(scores, groups), groups, right_mask, d,
                cfg.m, scaled_epsilon(scores, cfg.epsilon), trace);
}

StumpResult fit_eo_stump(const ScoreVector& scores, const ExperimentDataset& d,
                         const FeatureMatrix& x, const FitConfig& cfg) {
  cfg.validate();
  const std::size_t n = d.size();
  if (scores.size() != n || x.rows() != n) {
    throw Error("fit_eo_stump: length mismatch");
  }
  const int groups = effective_groups(cfg, n);
  const auto group = rank_levels(scores, groups);
  const double eps = scaled_epsilon(scores, cfg.epsilon);
  SplitConstraints limits;
  limits.min_leaf = static_cast<std::size_t>(
      std::ceil(cfg.min_split_fraction * static_cast<double>(n)));
  limits.min_arm = 0;
  const auto rows = all_rows(n);
  const auto candidates =
      enumerate_splits(d, x, rows, cfg.n_split_quantiles, limits);

  StumpResult best;
  std::vector<std::uint8_t> mask(n);
  for (const auto& c : candidates) {
    for (std::size_t i = 0; i < n; ++i) {
      mask[i] = x.at(i, c.feature) > c.threshold ? 1 : 0;
    }
    const ShiftResult r = search(scores, group, groups, mask, d, cfg.m, eps,
                                 nullptr);
    if (improves(r.delta_auuc, best.delta_auuc) && r.shift != 0.0) {
      best.delta_auuc = r.delta_auuc;
      best.stump = {c.feature, c.threshold, EOStump::Side::kRight, r.shift};
    }
  }
  return best;
}

FineTuner fit_eo(const ExperimentDataset& d, const FitConfig& cfg) {
  cfg.validate();
  FineTuner f;
  f.kind = FineTunerKind::kEO;
  f.feature_names = d.feature_names();
  f.config = cfg;
  const FeatureMatrix x(d, &d.base_score());
  ScoreVector working = d.base_score();
  StumpsStage stage;
  stage.uses_score_feature = true;
  double current = auuc(working, d, cfg.m);
  for (int k = 0; k < cfg.n_trees; ++k) {
    const StumpResult res = fit_eo_stump(working, d, x, cfg);
    if (res.stump.is_null()) break;
    ScoreVector next = working;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (res.stump.contains(x.at(i, res.stump.feature))) {
        next[i] += res.stump.shift;
      }
    }
    // Bucket-level gains are approximate; never accept a stump that lowers
    // the exact training AUUC.
    const double updated = auuc(next, d, cfg.m);
    if (updated < current - 1e-12 * (1.0 + std::abs(current))) break;
    current = updated;
    working = std::move(next);
    stage.stumps.push_back(res.stump);
  }
  f.stages.push_back(std::move(stage));
  f.stages.push_back(CalibrationStage{fit_calibration(working, d)});
  return f;
}

}  // namespace cft
