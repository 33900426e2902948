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

#include "json_convert.h"

#include <algorithm>

namespace cft::json_convert {
namespace {

template <typename T>
void read(const Json& j, const char* key, T& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const Json::exception& e) {
    throw Error(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

Json parse(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(std::string(what) + ": malformed JSON: " + e.what());
  }
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                std::string_view what) {
  if (!j.is_object()) throw Error(std::string(what) + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw Error(std::string(what) + ": unknown field '" + item.key() + "'");
    }
  }
}

Json to_json(const FitConfig& c) {
  return Json{{"max_depth", c.max_depth},
              {"min_leaf", c.min_leaf},
              {"min_arm", c.min_arm},
              {"n_split_quantiles", c.n_split_quantiles},
              {"min_gain", c.min_gain},
              {"m", c.m},
              {"n_trees", c.n_trees},
              {"min_split_fraction", c.min_split_fraction},
              {"bucket_groups", c.bucket_groups},
              {"epsilon", c.epsilon},
              {"treatment_cost", c.treatment_cost},
              {"seed", c.seed}};
}

FitConfig fit_config_from(const Json& j) {
  check_keys(j,
             {"max_depth", "min_leaf", "min_arm", "n_split_quantiles",
              "min_gain", "m", "n_trees", "min_split_fraction",
              "bucket_groups", "epsilon", "treatment_cost", "seed"},
             "fit config");
  FitConfig c;
  read(j, "max_depth", c.max_depth);
  read(j, "min_leaf", c.min_leaf);
  read(j, "min_arm", c.min_arm);
  read(j, "n_split_quantiles", c.n_split_quantiles);
  read(j, "min_gain", c.min_gain);
  read(j, "m", c.m);
  read(j, "n_trees", c.n_trees);
  read(j, "min_split_fraction", c.min_split_fraction);
  read(j, "bucket_groups", c.bucket_groups);
  read(j, "epsilon", c.epsilon);
  read(j, "treatment_cost", c.treatment_cost);
  read(j, "seed", c.seed);
  c.validate();
  return c;
}

Json to_json(const SimulationParams& p) {
  return Json{{"w", p.w},
              {"w_e", p.w_e},
              {"rho", p.rho},
              {"sigma2_alpha", p.sigma2_alpha},
              {"sigma2_beta", p.sigma2_beta},
              {"sigma2_y", p.sigma2_y},
              {"sigma2_c", p.sigma2_c},
              {"seed", p.seed}};
}

SimulationParams simulation_params_from(const Json& j) {
  check_keys(j,
             {"w", "w_e", "rho", "sigma2_alpha", "sigma2_beta", "sigma2_y",
              "sigma2_c", "seed"},
             "simulation params");
  SimulationParams p;
  read(j, "w", p.w);
  p.w_e = p.w;
  read(j, "w_e", p.w_e);
  read(j, "rho", p.rho);
  read(j, "sigma2_alpha", p.sigma2_alpha);
  read(j, "sigma2_beta", p.sigma2_beta);
  read(j, "sigma2_y", p.sigma2_y);
  read(j, "sigma2_c", p.sigma2_c);
  read(j, "seed", p.seed);
  p.validate();
  return p;
}

Json to_json(const PolicyConfig& p) {
  Json j{{"cost", p.cost}, {"threshold", p.threshold}};
  if (p.top_fraction) j["top_fraction"] = *p.top_fraction;
  return j;
}

PolicyConfig policy_config_from(const Json& j) {
  check_keys(j, {"cost", "threshold", "top_fraction"}, "policy config");
  PolicyConfig p;
  read(j, "cost", p.cost);
  read(j, "threshold", p.threshold);
  if (j.contains("top_fraction") && !j["top_fraction"].is_null()) {
    double q = 0.0;
    read(j, "top_fraction", q);
    if (!(q > 0.0 && q <= 1.0)) {
      throw Error("policy config: top_fraction must lie in (0, 1]");
    }
    p.top_fraction = q;
  }
  return p;
}

}  // namespace cft::json_convert
