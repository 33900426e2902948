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

#include "cft/benchmark.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <thread>
#include <tuple>

#include "cft/calibration.h"
#include "cft/effect_classification.h"
#include "cft/effect_estimation.h"
#include "cft/effect_ordering.h"
#include "json_convert.h"

namespace cft {
namespace {

constexpr std::array<std::pair<Method, std::string_view>, 7> kMethodNames{{
    {Method::kBS, "BS"},
    {Method::kBSCal, "BS_CAL"},
    {Method::kCT, "CT"},
    {Method::kCTBS, "CT_BS"},
    {Method::kEE, "EE"},
    {Method::kEO, "EO"},
    {Method::kEC, "EC"},
}};

constexpr std::array<std::pair<MetricName, std::string_view>, 3> kMetricNames{{
    {MetricName::kMse, "mse"},
    {MetricName::kAuuc, "auuc"},
    {MetricName::kPolicy, "policy"},
}};

struct RepOutput {
  std::vector<MetricRow> rows;
  std::vector<SkippedCell> skipped;
};

double evaluate(MetricName metric, const ScoreVector& scores,
                const SimulatedSample& test, const BenchmarkConfig& cfg) {
  switch (metric) {
    case MetricName::kMse:
      return mse_true(scores, test.truth);
    case MetricName::kAuuc:
      return auuc(scores, test.data, cfg.fit.m);
    case MetricName::kPolicy:
      return policy_value(policy_actions(scores, cfg.policy), test.data,
                          cfg.policy);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

RepOutput run_replication(const BenchmarkConfig& cfg, int rep) {
  Rng rng = make_stream(cfg.sim.seed, static_cast<std::uint64_t>(rep));
  const DgpInstance dgp = draw_dgp(cfg.sim, rng);
  const std::size_t pool_size =
      *std::max_element(cfg.train_sizes.begin(), cfg.train_sizes.end());
  const SimulatedSample pool = sample_population(dgp, pool_size, rng);
  const SimulatedSample test = sample_population(dgp, cfg.test_size, rng);

  RepOutput out;
  for (std::size_t size : cfg.train_sizes) {
    // Pool rows are i.i.d., so a prefix is a random subsample.
    const RowIndices rows = all_rows(size);
    const ExperimentDataset train = pool.data.subset(rows);
    for (Method method : cfg.methods) {
      ScoreVector scores;
      try {
        scores = apply_finetuner(fit_method(method, train, cfg.fit), test.data);
      } catch (const Error& e) {
        out.skipped.push_back({method, size, rep, e.what()});
      }
      for (MetricName metric : cfg.metrics) {
        const double value = scores.empty()
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : evaluate(metric, scores, test, cfg);
        out.rows.push_back({method, size, rep, metric, value});
      }
    }
  }
  return out;
}

auto row_key(const MetricRow& r) {
  return std::make_tuple(static_cast<int>(r.method), r.train_size, r.rep,
                         static_cast<int>(r.metric));
}

}  // namespace

std::string_view to_string(Method m) {
  for (const auto& [k, name] : kMethodNames) {
    if (k == m) return name;
  }
  return "unknown";
}

std::string_view to_string(MetricName m) {
  for (const auto& [k, name] : kMetricNames) {
    if (k == m) return name;
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  for (const auto& [k, n] : kMethodNames) {
    if (n == name) return k;
  }
  throw Error("unknown method '" + std::string(name) + "'");
}

MetricName metric_from_string(std::string_view name) {
  for (const auto& [k, n] : kMetricNames) {
    if (n == name) return k;
  }
  throw Error("unknown metric '" + std::string(name) + "'");
}

void BenchmarkConfig::validate() const {
  if (methods.empty()) throw Error("benchmark: no methods");
  if (train_sizes.empty()) throw Error("benchmark: no train sizes");
  for (std::size_t s : train_sizes) {
    if (s < 2) throw Error("benchmark: train sizes must be >= 2");
  }
  if (n_reps < 1) throw Error("benchmark: n_reps must be >= 1");
  if (test_size < 1) throw Error("benchmark: test_size must be >= 1");
  if (metrics.empty()) throw Error("benchmark: no metrics");
  if (workers < 1) throw Error("benchmark: workers must be >= 1");
  sim.validate();
  fit.validate();
}

FineTuner fit_method(Method method, const ExperimentDataset& train,
                     const FitConfig& cfg) {
  switch (method) {
    case Method::kBS: {
      FineTuner f;
      f.kind = FineTunerKind::kCalibrated;
      return f;
    }
    case Method::kBSCal:
      return fit_calibrated(train);
    case Method::kCT:
      return fit_causal_tree(train, false, cfg);
    case Method::kCTBS:
      return fit_causal_tree(train, true, cfg);
    case Method::kEE:
      return fit_ee(train, cfg);
    case Method::kEO:
      return fit_eo(train, cfg);
    case Method::kEC:
      return fit_ec(train, cfg);
  }
  throw Error("fit_method: unknown method");
}

MetricReport run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  std::vector<RepOutput> outputs(static_cast<std::size_t>(cfg.n_reps));
  std::vector<std::exception_ptr> failures(outputs.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int rep = next++; rep < cfg.n_reps; rep = next++) {
      try {
        outputs[rep] = run_replication(cfg, rep);
      } catch (...) {
        failures[rep] = std::current_exception();
      }
    }
  };
  const int n_threads = std::min(cfg.workers, cfg.n_reps);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  MetricReport report;
  for (auto& o : outputs) {
    report.rows.insert(report.rows.end(), o.rows.begin(), o.rows.end());
    report.skipped.insert(report.skipped.end(), o.skipped.begin(),
                          o.skipped.end());
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const MetricRow& a, const MetricRow& b) {
              return row_key(a) < row_key(b);
            });
  std::sort(report.skipped.begin(), report.skipped.end(),
            [](const SkippedCell& a, const SkippedCell& b) {
              return std::make_tuple(static_cast<int>(a.method), a.train_size,
                                     a.rep) <
                     std::make_tuple(static_cast<int>(b.method), b.train_size,
                                     b.rep);
            });
  return report;
}

std::vector<SummaryRow> summarize(const MetricReport& report) {
  using Key = std::tuple<int, std::size_t, int>;  // method, size, metric
  std::map<Key, std::pair<double, int>> acc;
  for (const auto& r : report.rows) {
    auto& slot = acc[{static_cast<int>(r.method), r.train_size,
                      static_cast<int>(r.metric)}];
    if (std::isnan(r.value)) continue;
    slot.first += r.value;
    slot.second += 1;
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, sum] : acc) {
    SummaryRow row;
    row.method = static_cast<Method>(std::get<0>(key));
    row.train_size = std::get<1>(key);
    row.metric = static_cast<MetricName>(std::get<2>(key));
    row.n = sum.second;
    row.mean = sum.second > 0 ? sum.first / sum.second
                              : std::numeric_limits<double>::quiet_NaN();
    out.push_back(row);
  }
  for (auto& row : out) {
    const auto it = std::find_if(out.begin(), out.end(), [&](const SummaryRow& b) {
      return b.method == Method::kBS && b.train_size == row.train_size &&
             b.metric == row.metric;
    });
    if (it == out.end() || it->mean == 0.0) {
      row.improvement_pct = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double base = it->mean;
    row.improvement_pct = row.metric == MetricName::kMse
                              ? 100.0 * (base - row.mean) / base
                              : 100.0 * (row.mean - base) / std::abs(base);
  }
  return out;
}

void write_report_csv(std::ostream& out, const MetricReport& report) {
  out << "method,train_size,rep,metric,value\n";
  for (const auto& r : report.rows) {
    out << to_string(r.method) << ',' << r.train_size << ',' << r.rep << ','
        << to_string(r.metric) << ','
        << (std::isnan(r.value) ? std::string("nan") : format_double(r.value))
        << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "method,train_size,metric,mean,n,improvement_pct\n";
  auto fmt = [](double v) {
    return std::isnan(v) ? std::string("nan") : format_double(v);
  };
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << r.train_size << ','
        << to_string(r.metric) << ',' << fmt(r.mean) << ',' << r.n << ','
        << fmt(r.improvement_pct) << '\n';
  }
}

BenchmarkConfig benchmark_config_from_json(std::string_view text) {
  using json_convert::Json;
  const Json j = json_convert::parse(text, "benchmark config");
  json_convert::check_keys(j,
                           {"methods", "train_sizes", "n_reps", "test_size",
                            "sim", "metrics", "policy", "fit", "workers"},
                           "benchmark config");
  BenchmarkConfig cfg;
  try {
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : j["methods"]) {
        cfg.methods.push_back(method_from_string(m.get<std::string>()));
      }
    }
    if (j.contains("metrics")) {
      cfg.metrics.clear();
      for (const auto& m : j["metrics"]) {
        cfg.metrics.push_back(metric_from_string(m.get<std::string>()));
      }
    }
    if (j.contains("train_sizes")) {
      cfg.train_sizes = j["train_sizes"].get<std::vector<std::size_t>>();
    }
    if (j.contains("n_reps")) cfg.n_reps = j["n_reps"].get<int>();
    if (j.contains("test_size")) cfg.test_size = j["test_size"].get<std::size_t>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  } catch (const Json::exception& e) {
    throw Error(std::string("benchmark config: ") + e.what());
  }
  if (j.contains("sim")) cfg.sim = json_convert::simulation_params_from(j["sim"]);
  if (j.contains("policy")) {
    cfg.policy = json_convert::policy_config_from(j["policy"]);
  }
  if (j.contains("fit")) cfg.fit = json_convert::fit_config_from(j["fit"]);
  cfg.validate();
  return cfg;
}

}  // namespace cft
