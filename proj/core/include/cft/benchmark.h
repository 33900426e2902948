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

// Monte-Carlo benchmark over simulated experiments: every replication draws
// a data-generating process, a training pool and a test set, fits each
// method at each training size and scores the test set against the truth.

#ifndef CFT_BENCHMARK_H_
#define CFT_BENCHMARK_H_

#include <cstddef>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cft/dataset.h"
#include "cft/finetuner.h"
#include "cft/metrics.h"
#include "cft/simulation.h"
#include "cft/tree.h"

namespace cft {

enum class Method { kBS, kBSCal, kCT, kCTBS, kEE, kEO, kEC };
enum class MetricName { kMse, kAuuc, kPolicy };

std::string_view to_string(Method m);
std::string_view to_string(MetricName m);
Method method_from_string(std::string_view name);
MetricName metric_from_string(std::string_view name);

struct BenchmarkConfig {
  std::vector<Method> methods{Method::kBS,  Method::kBSCal, Method::kCT,
                              Method::kCTBS, Method::kEE,   Method::kEO,
                              Method::kEC};
  std::vector<std::size_t> train_sizes{128,  256,  512,   1024, 2048,
                                       4096, 8192, 16384, 32768};
  int n_reps = 100;
  std::size_t test_size = 50000;
  SimulationParams sim;
  std::vector<MetricName> metrics{MetricName::kMse, MetricName::kAuuc,
                                  MetricName::kPolicy};
  PolicyConfig policy;
  FitConfig fit;
  int workers = 1;

  void validate() const;
};

struct MetricRow {
  Method method = Method::kBS;
  std::size_t train_size = 0;
  int rep = 0;
  MetricName metric = MetricName::kMse;
  double value = 0.0;  // NaN for skipped cells
};

struct SkippedCell {
  Method method = Method::kBS;
  std::size_t train_size = 0;
  int rep = 0;
  std::string reason;
};

struct MetricReport {
  std::vector<MetricRow> rows;  // sorted by (method, size, rep, metric)
  std::vector<SkippedCell> skipped;
};

// Replication means, with the percentage improvement over BS (positive is
// better: lower MSE, higher AUUC and policy value).
struct SummaryRow {
  Method method = Method::kBS;
  std::size_t train_size = 0;
  MetricName metric = MetricName::kMse;
  double mean = 0.0;
  int n = 0;
  double improvement_pct = 0.0;
};

// Fits `method` with the calibration pipeline it is benchmarked with. BS is
// the identity fine-tuner.
FineTuner fit_method(Method method, const ExperimentDataset& train,
                     const FitConfig& cfg);

MetricReport run_benchmark(const BenchmarkConfig& cfg);
std::vector<SummaryRow> summarize(const MetricReport& report);

// Columns method,train_size,rep,metric,value.
void write_report_csv(std::ostream& out, const MetricReport& report);
// Columns method,train_size,metric,mean,n,improvement_pct.
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

// JSON mirror of BenchmarkConfig; "sim", "policy" and "fit" are nested
// objects and methods/metrics are name lists.
BenchmarkConfig benchmark_config_from_json(std::string_view text);

}  // namespace cft

#endif  // CFT_BENCHMARK_H_
