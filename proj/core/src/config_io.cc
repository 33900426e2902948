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

#include "cft/config_io.h"

#include <fstream>
#include <sstream>

#include "json_convert.h"

namespace cft {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

FitConfig fit_config_from_json(std::string_view text) {
  return json_convert::fit_config_from(json_convert::parse(text, "fit config"));
}

std::string fit_config_to_json(const FitConfig& cfg) {
  return json_convert::to_json(cfg).dump(2);
}

SimulationParams simulation_params_from_json(std::string_view text) {
  return json_convert::simulation_params_from(
      json_convert::parse(text, "simulation params"));
}

std::string simulation_params_to_json(const SimulationParams& p) {
  return json_convert::to_json(p).dump(2);
}

PolicyConfig policy_config_from_json(std::string_view text) {
  return json_convert::policy_config_from(
      json_convert::parse(text, "policy config"));
}

}  // namespace cft
