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

#include "cft/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>
#include <system_error>

namespace cft {
namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  for (auto& f : fields) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) {
      f.remove_prefix(1);
    }
    while (!f.empty() &&
           (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) {
      f.remove_suffix(1);
    }
  }
  return fields;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::string location(std::size_t line, std::string_view column) {
  std::ostringstream os;
  os << "line " << line << ", column '" << column << "'";
  return os.str();
}

// Minimal reader for header + numeric body tables.
struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

NumericTable read_numeric_table(std::istream& in,
                                const std::vector<std::string>& binary_cols) {
  NumericTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error("empty dataset: missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  for (auto f : split_csv_line(line)) table.header.emplace_back(f);
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c].empty()) {
      throw Error("empty column name at position " + std::to_string(c + 1));
    }
    for (std::size_t p = 0; p < c; ++p) {
      if (table.header[p] == table.header[c]) {
        throw Error("duplicate column '" + table.header[c] + "'");
      }
    }
  }
  std::vector<bool> is_binary(table.header.size(), false);
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    is_binary[c] = std::find(binary_cols.begin(), binary_cols.end(),
                             table.header[c]) != binary_cols.end();
  }
  table.columns.resize(table.header.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != table.header.size()) {
      std::ostringstream os;
      os << "line " << line_no << ": expected " << table.header.size()
         << " fields, found " << fields.size();
      throw Error(os.str());
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (fields[c].empty()) {
        throw Error("missing value at " + location(line_no, table.header[c]));
      }
      const auto v = parse_double(fields[c]);
      if (!v) {
        throw Error("unparseable number '" + std::string(fields[c]) + "' at " +
                    location(line_no, table.header[c]));
      }
      if (is_binary[c] && *v != 0.0 && *v != 1.0) {
        throw Error("non-binary treatment value '" + std::string(fields[c]) +
                    "' at " + location(line_no, table.header[c]));
      }
      table.columns[c].push_back(*v);
    }
  }
  if (table.columns.empty() || table.columns.front().empty()) {
    throw Error("empty dataset: no data rows");
  }
  return table;
}

std::size_t find_column(const NumericTable& t, const std::string& name,
                        const char* role) {
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) {
    throw Error(std::string("missing ") + role + " column '" + name + "'");
  }
  return static_cast<std::size_t>(it - t.header.begin());
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

ExperimentDataset::ExperimentDataset(std::vector<std::string> feature_names,
                                     std::vector<double> features,
                                     std::vector<int> treatment,
                                     std::vector<double> outcome,
                                     std::vector<double> base_score,
                                     double propensity_treated)
    : feature_names_(std::move(feature_names)),
      features_(std::move(features)),
      treatment_(std::move(treatment)),
      outcome_(std::move(outcome)),
      base_score_(std::move(base_score)),
      propensity_(propensity_treated) {
  const std::size_t n = outcome_.size();
  if (n == 0) throw Error("empty dataset");
  if (treatment_.size() != n || base_score_.size() != n) {
    throw Error("dataset columns have different lengths");
  }
  if (features_.size() != n * feature_names_.size()) {
    throw Error("feature matrix does not match row count");
  }
  if (!(propensity_ > 0.0 && propensity_ < 1.0)) {
    throw Error("propensity must lie in (0, 1)");
  }
  for (int t : treatment_) {
    if (t != 0 && t != 1) throw Error("treatment values must be 0 or 1");
  }
}

std::size_t ExperimentDataset::treated_count() const {
  return static_cast<std::size_t>(
      std::count(treatment_.begin(), treatment_.end(), 1));
}

ExperimentDataset ExperimentDataset::with_base_score(ScoreVector scores) const {
  if (scores.size() != size()) throw Error("score vector length mismatch");
  ExperimentDataset copy = *this;
  copy.base_score_ = std::move(scores);
  return copy;
}

ExperimentDataset ExperimentDataset::subset(
    std::span<const std::size_t> rows) const {
  const std::size_t n = size();
  const std::size_t k = num_features();
  std::vector<double> features(rows.size() * k);
  std::vector<int> treatment(rows.size());
  std::vector<double> outcome(rows.size());
  std::vector<double> base(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::size_t i = rows[r];
    for (std::size_t c = 0; c < k; ++c) {
      features[c * rows.size() + r] = features_[c * n + i];
    }
    treatment[r] = treatment_[i];
    outcome[r] = outcome_[i];
    base[r] = base_score_[i];
  }
  return ExperimentDataset(feature_names_, std::move(features),
                           std::move(treatment), std::move(outcome),
                           std::move(base), propensity_);
}

SimulatedTruth SimulatedTruth::subset(std::span<const std::size_t> rows) const {
  SimulatedTruth out;
  out.y0.reserve(rows.size());
  out.y1.reserve(rows.size());
  out.cate.reserve(rows.size());
  for (std::size_t i : rows) {
    out.y0.push_back(y0[i]);
    out.y1.push_back(y1[i]);
    out.cate.push_back(cate[i]);
  }
  return out;
}

ExperimentDataset load_dataset(std::istream& in, const ColumnRoles& roles,
                               double propensity_treated) {
  if (!(propensity_treated > 0.0 && propensity_treated < 1.0)) {
    throw Error("propensity must lie in (0, 1)");
  }
  NumericTable t = read_numeric_table(in, {roles.treatment});
  const std::size_t t_col = find_column(t, roles.treatment, "treatment");
  const std::size_t y_col = find_column(t, roles.outcome, "outcome");
  const std::size_t s_col = find_column(t, roles.score, "score");
  if (t_col == y_col || t_col == s_col || y_col == s_col) {
    throw Error("treatment, outcome and score roles must be distinct columns");
  }
  const std::size_t n = t.columns.front().size();
  std::vector<std::string> names;
  std::vector<double> features;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c == t_col || c == y_col || c == s_col) continue;
    names.push_back(t.header[c]);
    features.insert(features.end(), t.columns[c].begin(), t.columns[c].end());
  }
  std::vector<int> treatment(n);
  for (std::size_t i = 0; i < n; ++i) {
    treatment[i] = static_cast<int>(t.columns[t_col][i]);
  }
  return ExperimentDataset(std::move(names), std::move(features),
                           std::move(treatment), std::move(t.columns[y_col]),
                           std::move(t.columns[s_col]), propensity_treated);
}

ExperimentDataset load_dataset_file(const std::string& path,
                                    const ColumnRoles& roles,
                                    double propensity_treated) {
  auto in = open_in(path);
  return load_dataset(in, roles, propensity_treated);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void save_dataset(std::ostream& out, const ExperimentDataset& d,
                  const ColumnRoles& roles) {
  for (const auto& name : d.feature_names()) out << name << ',';
  out << roles.treatment << ',' << roles.outcome << ',' << roles.score << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t c = 0; c < d.num_features(); ++c) {
      out << format_double(d.feature(i, c)) << ',';
    }
    out << d.treatment()[i] << ',' << format_double(d.outcome()[i]) << ','
        << format_double(d.base_score()[i]) << '\n';
  }
}

void save_dataset_file(const std::string& path, const ExperimentDataset& d,
                       const ColumnRoles& roles) {
  auto out = open_out(path);
  save_dataset(out, d, roles);
}

SimulatedTruth load_truth(std::istream& in) {
  NumericTable t = read_numeric_table(in, {});
  SimulatedTruth truth;
  truth.y0 = std::move(t.columns[find_column(t, "y0", "truth")]);
  truth.y1 = std::move(t.columns[find_column(t, "y1", "truth")]);
  truth.cate = std::move(t.columns[find_column(t, "cate", "truth")]);
  return truth;
}

SimulatedTruth load_truth_file(const std::string& path) {
  auto in = open_in(path);
  return load_truth(in);
}

void save_truth(std::ostream& out, const SimulatedTruth& truth) {
  out << "y0,y1,cate\n";
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out << format_double(truth.y0[i]) << ',' << format_double(truth.y1[i])
        << ',' << format_double(truth.cate[i]) << '\n';
  }
}

void save_truth_file(const std::string& path, const SimulatedTruth& truth) {
  auto out = open_out(path);
  save_truth(out, truth);
}

ScoreVector load_scores_file(const std::string& path) {
  auto in = open_in(path);
  NumericTable t = read_numeric_table(in, {});
  return std::move(t.columns[find_column(t, "score", "score")]);
}

void save_scores_file(const std::string& path, const ScoreVector& scores) {
  auto out = open_out(path);
  out << "score\n";
  for (double s : scores) out << format_double(s) << '\n';
}

std::vector<double> transformed_outcome(const ExperimentDataset& d) {
  const double p1 = d.propensity_treated();
  std::vector<double> z(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double y = d.outcome()[i];
    const double t = d.treatment()[i];
    z[i] = y * t / p1 - y * (1.0 - t) / (1.0 - p1);
  }
  return z;
}

}  // namespace cft
