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

// JSON conversions shared by model persistence, config files and the
// benchmark harness. Private to the library.

#ifndef CFT_SRC_JSON_CONVERT_H_
#define CFT_SRC_JSON_CONVERT_H_

#include <initializer_list>
#include <string>
#include <string_view>

#include "cft/dataset.h"
#include "cft/metrics.h"
#include "cft/simulation.h"
#include "cft/tree.h"
#include "json.hpp"

namespace cft::json_convert {

using Json = nlohmann::json;

Json parse(std::string_view text, std::string_view what);

// Throws when `j` holds a key outside `allowed`.
void check_keys(const Json& j, std::initializer_list<std::string_view> allowed,
                std::string_view what);

Json to_json(const FitConfig& cfg);
FitConfig fit_config_from(const Json& j);

Json to_json(const SimulationParams& p);
SimulationParams simulation_params_from(const Json& j);

Json to_json(const PolicyConfig& p);
PolicyConfig policy_config_from(const Json& j);

}  // namespace cft::json_convert

#endif  // CFT_SRC_JSON_CONVERT_H_
