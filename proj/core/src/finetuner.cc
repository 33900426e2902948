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

#include "cft/finetuner.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "json_convert.h"

namespace cft {
namespace {

using json_convert::Json;

constexpr std::array<std::pair<FineTunerKind, std::string_view>, 6> kKindNames{{
    {FineTunerKind::kCalibrated, "calibrated"},
    {FineTunerKind::kEE, "ee"},
    {FineTunerKind::kEC, "ec"},
    {FineTunerKind::kEO, "eo"},
    {FineTunerKind::kCT, "ct"},
    {FineTunerKind::kCTBS, "ct_bs"},
}};

// Column-major copy of the model's features taken from `d` by name.
std::vector<double> gather_features(const FineTuner& f,
                                    const ExperimentDataset& d) {
  const std::size_t n = d.size();
  std::vector<double> out;
  out.reserve(n * (f.feature_names.size() + 1));
  for (const auto& name : f.feature_names) {
    const auto& names = d.feature_names();
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      throw Error("apply: dataset lacks feature '" + name + "'");
    }
    const auto col = d.column(static_cast<std::size_t>(it - names.begin()));
    out.insert(out.end(), col.begin(), col.end());
  }
  return out;
}

FeatureMatrix stage_matrix(const std::vector<double>& features, std::size_t n,
                           bool with_score, const ScoreVector& score) {
  std::vector<double> data = features;
  if (with_score) data.insert(data.end(), score.begin(), score.end());
  return FeatureMatrix(n, std::move(data));
}

// Trees serialize in pre-order, which is also the order grow_tree emits.
Json tree_to_json(const Tree& t, int id) {
  const Tree::Node& node = t.nodes()[id];
  if (node.is_leaf()) return Json{{"leaf", node.payload}};
  return Json{{"feature", node.feature},
              {"threshold", node.threshold},
              {"left", tree_to_json(t, node.left)},
              {"right", tree_to_json(t, node.right)}};
}

int tree_from_json(const Json& j, std::size_t n_features,
                   std::vector<Tree::Node>& nodes) {
  if (!j.is_object()) throw Error("model: tree node must be an object");
  const int id = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (j.contains("leaf")) {
    json_convert::check_keys(j, {"leaf"}, "tree leaf");
    nodes[id].payload = j.at("leaf").get<double>();
    return id;
  }
  json_convert::check_keys(j, {"feature", "threshold", "left", "right"},
                           "tree node");
  const int feature = j.at("feature").get<int>();
  if (feature < 0 || static_cast<std::size_t>(feature) >= n_features) {
    throw Error("model: tree feature index " + std::to_string(feature) +
                " out of range");
  }
  const double threshold = j.at("threshold").get<double>();
  const int left = tree_from_json(j.at("left"), n_features, nodes);
  const int right = tree_from_json(j.at("right"), n_features, nodes);
  nodes[id].feature = feature;
  nodes[id].threshold = threshold;
  nodes[id].left = left;
  nodes[id].right = right;
  return id;
}

Json stage_to_json(const Stage& stage) {
  if (const auto* c = std::get_if<CalibrationStage>(&stage)) {
    return Json{{"type", "calibration"},
                {"scale", c->params.scale},
                {"shift", c->params.shift}};
  }
  if (const auto* t = std::get_if<TreeStage>(&stage)) {
    return Json{{"type", "tree"},
                {"combine", t->replace_base ? "replace" : "subtract"},
                {"score_feature", t->uses_score_feature},
                {"tree", tree_to_json(t->tree, 0)}};
  }
  const auto& s = std::get<StumpsStage>(stage);
  Json stumps = Json::array();
  for (const auto& st : s.stumps) {
    stumps.push_back(
        {{"feature", st.feature},
         {"threshold", st.threshold},
         {"side", st.shifted_side == EOStump::Side::kRight ? "right" : "left"},
         {"shift", st.shift}});
  }
  return Json{{"type", "stumps"},
              {"score_feature", s.uses_score_feature},
              {"stumps", std::move(stumps)}};
}

Stage stage_from_json(const Json& j, std::size_t n_named) {
  const auto type = j.at("type").get<std::string>();
  if (type == "calibration") {
    json_convert::check_keys(j, {"type", "scale", "shift"}, "calibration stage");
    return CalibrationStage{
        {j.at("scale").get<double>(), j.at("shift").get<double>()}};
  }
  if (type == "tree") {
    json_convert::check_keys(j, {"type", "combine", "score_feature", "tree"},
                             "tree stage");
    TreeStage t;
    const auto combine = j.at("combine").get<std::string>();
    if (combine != "subtract" && combine != "replace") {
      throw Error("model: unknown tree combine '" + combine + "'");
    }
    t.replace_base = combine == "replace";
    t.uses_score_feature = j.at("score_feature").get<bool>();
    std::vector<Tree::Node> nodes;
    tree_from_json(j.at("tree"), n_named + (t.uses_score_feature ? 1 : 0),
                   nodes);
    t.tree = Tree(std::move(nodes));
    return t;
  }
  if (type == "stumps") {
    json_convert::check_keys(j, {"type", "score_feature", "stumps"},
                             "stumps stage");
    StumpsStage s;
    s.uses_score_feature = j.at("score_feature").get<bool>();
    const std::size_t limit = n_named + (s.uses_score_feature ? 1 : 0);
    for (const auto& js : j.at("stumps")) {
      json_convert::check_keys(js, {"feature", "threshold", "side", "shift"},
                               "stump");
      EOStump st;
      st.feature = js.at("feature").get<std::size_t>();
      if (st.feature >= limit) throw Error("model: stump feature out of range");
      st.threshold = js.at("threshold").get<double>();
      const auto side = js.at("side").get<std::string>();
      if (side != "left" && side != "right") {
        throw Error("model: unknown stump side '" + side + "'");
      }
      st.shifted_side =
          side == "right" ? EOStump::Side::kRight : EOStump::Side::kLeft;
      st.shift = js.at("shift").get<double>();
      s.stumps.push_back(st);
    }
    return s;
  }
  throw Error("model: unknown stage type '" + type + "'");
}

}  // namespace

std::string_view to_string(FineTunerKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

FineTunerKind fine_tuner_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw Error("unknown fine-tuner kind '" + std::string(name) + "'");
}

FineTuner fit_calibrated(const ExperimentDataset& d) {
  FineTuner f;
  f.kind = FineTunerKind::kCalibrated;
  f.stages.push_back(CalibrationStage{fit_calibration(d.base_score(), d)});
  return f;
}

ScoreVector apply_finetuner(const FineTuner& f, const ExperimentDataset& d) {
  const std::size_t n = d.size();
  const std::vector<double> features = gather_features(f, d);
  ScoreVector score = d.base_score();
  for (const Stage& stage : f.stages) {
    if (const auto* c = std::get_if<CalibrationStage>(&stage)) {
      score = apply_calibration(c->params, score);
    } else if (const auto* t = std::get_if<TreeStage>(&stage)) {
      const FeatureMatrix x =
          stage_matrix(features, n, t->uses_score_feature, score);
      for (std::size_t i = 0; i < n; ++i) {
        score[i] = (t->replace_base ? 0.0 : score[i]) - t->tree.predict(x, i);
      }
    } else {
      const auto& s = std::get<StumpsStage>(stage);
      const FeatureMatrix x =
          stage_matrix(features, n, s.uses_score_feature, score);
      for (const EOStump& st : s.stumps) {
        for (std::size_t i = 0; i < n; ++i) {
          if (st.contains(x.at(i, st.feature))) score[i] += st.shift;
        }
      }
    }
  }
  return score;
}

std::string finetuner_to_json(const FineTuner& f) {
  Json stages = Json::array();
  for (const auto& s : f.stages) stages.push_back(stage_to_json(s));
  const Json j{{"schema_version", FineTuner::kSchemaVersion},
               {"kind", std::string(to_string(f.kind))},
               {"feature_names", f.feature_names},
               {"config", json_convert::to_json(f.config)},
               {"stages", std::move(stages)}};
  return j.dump(2);
}

FineTuner finetuner_from_json(std::string_view text) {
  const Json j = json_convert::parse(text, "model");
  try {
    json_convert::check_keys(
        j, {"schema_version", "kind", "feature_names", "config", "stages"},
        "model");
    const int version = j.at("schema_version").get<int>();
    if (version != FineTuner::kSchemaVersion) {
      throw Error("model: schema version " + std::to_string(version) +
                  " is not supported (expected " +
                  std::to_string(FineTuner::kSchemaVersion) + ")");
    }
    FineTuner f;
    f.kind = fine_tuner_kind_from_string(j.at("kind").get<std::string>());
    f.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (j.contains("config")) {
      f.config = json_convert::fit_config_from(j.at("config"));
    }
    for (const auto& s : j.at("stages")) {
      f.stages.push_back(stage_from_json(s, f.feature_names.size()));
    }
    return f;
  } catch (const Json::exception& e) {
    throw Error(std::string("model: invalid structure: ") + e.what());
  }
}

void save_model(const FineTuner& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << finetuner_to_json(f) << '\n';
}

FineTuner load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return finetuner_from_json(os.str());
}

}  // namespace cft
