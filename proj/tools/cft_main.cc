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

// Command-line front end: simulate, fit, apply, evaluate, benchmark.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cft/benchmark.h"
#include "cft/config_io.h"
#include "cft/dataset.h"
#include "cft/effect_classification.h"
#include "cft/effect_estimation.h"
#include "cft/effect_ordering.h"
#include "cft/finetuner.h"
#include "cft/metrics.h"
#include "cft/simulation.h"
#include "json.hpp"

namespace {

struct DataOptions {
  std::string path;
  cft::ColumnRoles roles;
  double propensity = 0.5;
};

void add_data_options(CLI::App* cmd, DataOptions& o, bool need_propensity) {
  cmd->add_option("--data", o.path, "Dataset CSV")->required();
  cmd->add_option("--treatment-col", o.roles.treatment, "Treatment column")
      ->capture_default_str();
  cmd->add_option("--outcome-col", o.roles.outcome, "Outcome column")
      ->capture_default_str();
  cmd->add_option("--score-col", o.roles.score, "Base-score column")
      ->capture_default_str();
  auto* p = cmd->add_option("--propensity", o.propensity,
                            "Designed probability of treatment")
                ->check(CLI::Range(0.0, 1.0))
                ->capture_default_str();
  if (need_propensity) p->required();
}

cft::ExperimentDataset load(const DataOptions& o) {
  if (!(o.propensity > 0.0 && o.propensity < 1.0)) {
    throw cft::Error("--propensity must lie strictly between 0 and 1");
  }
  return cft::load_dataset_file(o.path, o.roles, o.propensity);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw cft::Error("cannot open '" + path + "' for writing");
  return out;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::string params;
  std::size_t n = 0;
  std::string out;
  std::string truth_out;
  std::uint64_t sample_stream = 0;
};

void run_simulate(const SimulateArgs& a) {
  const auto p = a.params.empty()
                     ? cft::SimulationParams{}
                     : cft::simulation_params_from_json(
                           cft::read_text_file(a.params));
  // The DGP depends on the seed only; samples on (seed, stream).
  cft::Rng dgp_rng = cft::make_stream(p.seed, 0);
  const auto dgp = cft::draw_dgp(p, dgp_rng);
  cft::Rng rng = cft::make_stream(p.seed, a.sample_stream + 1);
  const auto sample = cft::sample_population(dgp, a.n, rng);
  cft::save_dataset_file(a.out, sample.data, cft::ColumnRoles{});
  const std::string truth_path =
      a.truth_out.empty() ? a.out + ".truth.csv" : a.truth_out;
  cft::save_truth_file(truth_path, sample.truth);
}

// fit -----------------------------------------------------------------------

struct FitArgs {
  std::string method;
  DataOptions data;
  std::string out;
  std::string config;
};

void run_fit(const FitArgs& a) {
  const auto d = load(a.data);
  const auto cfg = a.config.empty()
                       ? cft::FitConfig{}
                       : cft::fit_config_from_json(cft::read_text_file(a.config));
  cft::FineTuner f;
  if (a.method == "calibrate") {
    f = cft::fit_calibrated(d);
  } else if (a.method == "ee") {
    f = cft::fit_ee(d, cfg);
  } else if (a.method == "ec") {
    f = cft::fit_ec(d, cfg);
  } else if (a.method == "eo") {
    f = cft::fit_eo(d, cfg);
  } else if (a.method == "ct") {
    f = cft::fit_causal_tree(d, false, cfg);
  } else {
    f = cft::fit_causal_tree(d, true, cfg);
  }
  cft::save_model(f, a.out);
}

// apply ---------------------------------------------------------------------

struct ApplyArgs {
  std::string model;
  DataOptions data;
  std::string out;
};

void run_apply(const ApplyArgs& a) {
  const auto f = cft::load_model(a.model);
  cft::save_scores_file(a.out, cft::apply_finetuner(f, load(a.data)));
}

// evaluate ------------------------------------------------------------------

struct EvaluateArgs {
  std::string scores;
  DataOptions data;
  std::string truth;
  std::vector<std::string> metrics;
  int m = 10;
  int bins = 10;
  double cost = 0.0;
  double threshold = 0.0;
  std::optional<double> top_fraction;
};

void run_evaluate(const EvaluateArgs& a) {
  const auto d = load(a.data);
  const auto scores = cft::load_scores_file(a.scores);
  if (scores.size() != d.size()) {
    throw cft::Error("scores have " + std::to_string(scores.size()) +
                     " rows but the dataset has " + std::to_string(d.size()));
  }
  std::optional<cft::SimulatedTruth> truth;
  if (!a.truth.empty()) {
    truth = cft::load_truth_file(a.truth);
    if (truth->size() != d.size()) throw cft::Error("truth row count mismatch");
  }
  std::vector<std::string> metrics = a.metrics;
  if (metrics.empty()) {
    metrics = {truth ? "mse" : "binned_mse", "auuc", "policy_value"};
  }
  cft::PolicyConfig policy;
  policy.cost = a.cost;
  policy.threshold = a.threshold;
  policy.top_fraction = a.top_fraction;

  nlohmann::ordered_json out;
  for (const auto& name : metrics) {
    if (name == "mse") {
      if (!truth) throw cft::Error("metric 'mse' needs --truth");
      out["mse"] = cft::mse_true(scores, *truth);
    } else if (name == "binned_mse") {
      // Bins follow the dataset's own (uncalibrated) base scores.
      out["binned_mse"] = cft::binned_mse(scores, d.base_score(), d, a.bins);
    } else if (name == "auuc") {
      out["auuc"] = cft::auuc(scores, d, a.m);
    } else if (name == "policy_value") {
      out["policy_value"] =
          cft::policy_value(cft::policy_actions(scores, policy), d, policy);
    } else if (name == "ewm") {
      if (!truth) throw cft::Error("metric 'ewm' needs --truth");
      out["ewm"] = cft::ewm_true(scores, *truth, policy);
    } else {
      throw cft::Error("unknown metric '" + name + "'");
    }
  }
  std::cout << out.dump() << '\n';
}

// benchmark -----------------------------------------------------------------

struct BenchmarkArgs {
  std::string config;
  std::string out;
  std::string summary_out;
  int workers = 0;
};

void run_benchmark_cmd(const BenchmarkArgs& a) {
  auto cfg = cft::benchmark_config_from_json(cft::read_text_file(a.config));
  if (a.workers > 0) cfg.workers = a.workers;
  const auto report = cft::run_benchmark(cfg);
  {
    auto out = open_out(a.out);
    cft::write_report_csv(out, report);
  }
  const auto summary = cft::summarize(report);
  if (!a.summary_out.empty()) {
    auto out = open_out(a.summary_out);
    cft::write_summary_csv(out, summary);
  }
  for (const auto& s : report.skipped) {
    std::cerr << "skipped " << cft::to_string(s.method) << " size "
              << s.train_size << " rep " << s.rep << ": " << s.reason << '\n';
  }
  cft::write_summary_csv(std::cout, summary);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal fine-tuning of base scores from experiment data"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample a simulated experiment");
  simulate->add_option("--params", sim.params, "Simulation parameters JSON");
  simulate->add_option("--n", sim.n, "Rows to sample")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim.out, "Output dataset CSV")->required();
  simulate->add_option("--truth-out", sim.truth_out,
                       "Ground-truth CSV (default: <out>.truth.csv)");
  simulate->add_option("--sample-stream", sim.sample_stream,
                       "Sample index; the same seed keeps the same DGP");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a fine-tuner");
  fit_cmd->add_option("--method", fit.method, "Fine-tuning method")
      ->required()
      ->check(CLI::IsMember({"calibrate", "ee", "ec", "eo", "ct", "ct-bs"}));
  add_data_options(fit_cmd, fit.data, true);
  fit_cmd->add_option("--out", fit.out, "Output model JSON")->required();
  fit_cmd->add_option("--config", fit.config, "Fit configuration JSON");

  ApplyArgs apply;
  auto* apply_cmd = app.add_subcommand("apply", "Score a dataset with a model");
  apply_cmd->add_option("--model", apply.model, "Model JSON")->required();
  add_data_options(apply_cmd, apply.data, false);
  apply_cmd->add_option("--out", apply.out, "Output scores CSV")->required();

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate scores");
  eval_cmd->add_option("--scores", eval.scores, "Scores CSV")->required();
  add_data_options(eval_cmd, eval.data, false);
  eval_cmd->add_option("--truth", eval.truth, "Ground-truth CSV");
  eval_cmd
      ->add_option("--metrics", eval.metrics,
                   "mse, binned_mse, auuc, policy_value, ewm")
      ->delimiter(',');
  eval_cmd->add_option("--m", eval.m, "AUUC levels")->capture_default_str();
  eval_cmd->add_option("--bins", eval.bins, "Binned-MSE bins")
      ->capture_default_str();
  eval_cmd->add_option("--cost", eval.cost, "Treatment cost");
  eval_cmd->add_option("--threshold", eval.threshold, "Treat above this score");
  eval_cmd->add_option("--top-fraction", eval.top_fraction,
                       "Treat this fraction of highest scores instead");

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Run the simulation benchmark");
  bench_cmd->add_option("--config", bench.config, "Benchmark JSON")->required();
  bench_cmd->add_option("--out", bench.out, "Report CSV")->required();
  bench_cmd->add_option("--summary-out", bench.summary_out, "Summary CSV");
  bench_cmd->add_option("--workers", bench.workers, "Override worker count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) run_simulate(sim);
    if (fit_cmd->parsed()) run_fit(fit);
    if (apply_cmd->parsed()) run_apply(apply);
    if (eval_cmd->parsed()) run_evaluate(eval);
    if (bench_cmd->parsed()) run_benchmark_cmd(bench);
  } catch (const cft::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
