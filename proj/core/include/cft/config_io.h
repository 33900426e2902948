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

// Text-based loading of fit, simulation and policy configuration files.

#ifndef CFT_CONFIG_IO_H_
#define CFT_CONFIG_IO_H_

#include <string>
#include <string_view>

#include "cft/metrics.h"
#include "cft/simulation.h"
#include "cft/tree.h"

namespace cft {

std::string read_text_file(const std::string& path);

// Missing fields keep their defaults; unknown fields are rejected.
FitConfig fit_config_from_json(std::string_view text);
std::string fit_config_to_json(const FitConfig& cfg);

SimulationParams simulation_params_from_json(std::string_view text);
std::string simulation_params_to_json(const SimulationParams& p);

PolicyConfig policy_config_from_json(std::string_view text);

}  // namespace cft

#endif  // CFT_CONFIG_IO_H_
