// Copyright 2026 The spikeguard Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spikeguard/dataio/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "spikeguard/errors.hpp"

namespace spikeguard::dataio {

using nlohmann::json;

Dataset Dataset::select(std::span<const std::size_t> indices) const {
  Dataset out;
  out.feature_names = feature_names;
  const std::size_t f = cols();
  out.features.reserve(indices.size() * f);
  out.labels.reserve(indices.size());
  out.month.reserve(indices.size());
  for (const auto& [name, _] : sensitive) out.sensitive[name].reserve(indices.size());
  for (std::size_t i : indices) {
    const auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
    out.month.push_back(month[i]);
    for (const auto& [name, values] : sensitive) out.sensitive[name].push_back(values[i]);
  }
  return out;
}

std::size_t Dataset::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

void Dataset::validate() const {
  const std::size_t n = rows();
  if (features.size() != n * cols()) {
    throw InputError("dataset feature matrix has " + std::to_string(features.size()) +
                     " cells, expected " + std::to_string(n) + " x " + std::to_string(cols()));
  }
  if (month.size() != n) throw InputError("dataset month column length mismatch");
  for (const auto& [name, values] : sensitive) {
    if (values.size() != n) throw InputError("dataset sensitive column '" + name + "' length mismatch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) {
      throw InputError("dataset label at row " + std::to_string(i) + " is not binary");
    }
  }
}

// ---------------------------------------------------------------- schema

void Schema::validate() const {
  std::set<std::string> roles{label_column};
  auto claim = [&roles](const std::string& col, const std::string& role) {
    if (!roles.insert(col).second) {
      throw SchemaError("column '" + col + "' is used as " + role + " and as another role");
    }
  };
  claim(month_column, "month");
  for (const auto& [attr, col] : sensitive_columns) claim(col, "sensitive attribute " + attr);
  if (feature_columns.empty()) throw SchemaError("schema lists no feature columns");
  for (const auto& col : feature_columns) {
    if (col == label_column || col == month_column) {
      throw SchemaError("feature column '" + col + "' collides with the label/month column");
    }
  }
}

std::string schema_to_json(const Schema& schema) {
  json j;
  j["label_column"] = schema.label_column;
  j["month_column"] = schema.month_column;
  j["sensitive_columns"] = schema.sensitive_columns;
  j["feature_columns"] = schema.feature_columns;
  j["categorical_columns"] = schema.categorical_columns;
  return j.dump(2);
}

Schema schema_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("schema is not valid JSON: ") + e.what());
  }
  Schema s;
  try {
    s.label_column = j.value("label_column", s.label_column);
    s.month_column = j.value("month_column", s.month_column);
    if (j.contains("sensitive_columns")) {
      s.sensitive_columns = j.at("sensitive_columns").get<std::map<std::string, std::string>>();
    }
    s.feature_columns = j.at("feature_columns").get<std::vector<std::string>>();
    if (j.contains("categorical_columns")) {
      s.categorical_columns =
          j.at("categorical_columns").get<std::map<std::string, std::map<std::string, int>>>();
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed schema: ") + e.what());
  }
  s.validate();
  return s;
}

Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open schema file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return schema_from_json(buf.str());
}

void save_schema(const Schema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write schema file '" + path + "'");
  out << schema_to_json(schema) << '\n';
}

std::string schema_hash(const Schema& schema) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : schema_to_json(schema)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

// ---------------------------------------------------------------- csv

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first == last) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

Dataset load_csv(const std::string& path, const Schema& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw SchemaError("data file '" + path + "' is empty (no header row)");
  }
  const auto header = split_csv_line(line);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
  auto column = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw SchemaError("column '" + name + "' missing from '" + path + "'");
    return it->second;
  };

  const std::size_t label_col = column(schema.label_column);
  const std::size_t month_col = column(schema.month_column);
  std::vector<std::size_t> feature_cols;
  for (const auto& name : schema.feature_columns) feature_cols.push_back(column(name));
  std::vector<std::pair<std::string, std::size_t>> sensitive_cols;
  for (const auto& [attr, name] : schema.sensitive_columns) {
    sensitive_cols.emplace_back(attr, column(name));
  }
  std::vector<const std::map<std::string, int>*> codes(header.size(), nullptr);
  for (const auto& [name, map] : schema.categorical_columns) {
    auto it = index.find(name);
    if (it != index.end()) codes[it->second] = &map;
  }

  Dataset ds;
  ds.feature_names = schema.feature_columns;
  for (const auto& [attr, _] : sensitive_cols) ds.sensitive[attr];

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw IngestionError(row, "row " + std::to_string(row) + " has " +
                                    std::to_string(cells.size()) + " cells, header has " +
                                    std::to_string(header.size()));
    }
    auto value = [&](std::size_t col) -> double {
      const std::string& cell = cells[col];
      if (codes[col] != nullptr) {
        auto it = codes[col]->find(cell);
        if (it == codes[col]->end()) {
          throw IngestionError(row, "unknown category '" + cell + "' in column '" + header[col] +
                                        "' at row " + std::to_string(row));
        }
        return it->second;
      }
      auto v = parse_number(cell);
      if (!v) {
        throw IngestionError(row, "missing or non-numeric value '" + cell + "' in column '" +
                                      header[col] + "' at row " + std::to_string(row));
      }
      return *v;
    };
    const double label = value(label_col);
    if (label != 0.0 && label != 1.0) {
      throw IngestionError(row, "label at row " + std::to_string(row) + " is not 0/1");
    }
    ds.labels.push_back(static_cast<int>(label));
    const double m = value(month_col);
    if (m != std::floor(m) || m < 0) {
      throw IngestionError(row, "month at row " + std::to_string(row) + " is not a non-negative integer");
    }
    ds.month.push_back(static_cast<int>(m));
    for (std::size_t col : feature_cols) ds.features.push_back(value(col));
    for (const auto& [attr, col] : sensitive_cols) ds.sensitive[attr].push_back(value(col));
    ++row;
  }
  return ds;
}

void save_csv(const Dataset& ds, const Schema& schema, const std::string& path) {
  ds.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write data file '" + path + "'");

  // Column order: features, then sensitive columns not already features,
  // then month and label.
  std::vector<std::string> header = schema.feature_columns;
  std::vector<std::pair<std::string, std::string>> extra_sensitive;
  for (const auto& [attr, col] : schema.sensitive_columns) {
    if (std::find(header.begin(), header.end(), col) == header.end()) {
      header.push_back(col);
      extra_sensitive.emplace_back(attr, col);
    }
  }
  header.push_back(schema.month_column);
  header.push_back(schema.label_column);

  std::map<std::string, std::map<int, std::string>> decode;
  for (const auto& [col, map] : schema.categorical_columns) {
    for (const auto& [name, code] : map) decode[col][code] = name;
  }
  auto cell = [&decode](const std::string& col, double v) {
    auto it = decode.find(col);
    if (it != decode.end()) {
      auto hit = it->second.find(static_cast<int>(v));
      if (hit != it->second.end()) return hit->second;
    }
    return format_number(v);
  };

  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const auto feats = ds.row(r);
    for (std::size_t c = 0; c < feats.size(); ++c) {
      out << (c ? "," : "") << cell(schema.feature_columns[c], feats[c]);
    }
    for (const auto& [attr, col] : extra_sensitive) {
      out << ',' << cell(col, ds.sensitive.at(attr)[r]);
    }
    out << ',' << ds.month[r] << ',' << ds.labels[r] << '\n';
  }
}

// ---------------------------------------------------------------- split

Split temporal_split(const Dataset& ds, int train_months) {
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    (ds.month[i] < train_months ? train_idx : test_idx).push_back(i);
  }
  if (train_idx.empty() || test_idx.empty()) {
    throw SplitError("temporal split at month " + std::to_string(train_months) + " leaves the " +
                     (train_idx.empty() ? "train" : "test") + " side empty");
  }
  return {ds.select(train_idx), ds.select(test_idx)};
}

// ---------------------------------------------------------------- scaling

NormStats fit_normalization(const Dataset& train) {
  const std::size_t n = train.rows();
  const std::size_t f = train.cols();
  if (n == 0) throw InputError("cannot fit normalization on an empty training set");
  NormStats stats{std::vector<double>(f, 0.0), std::vector<double>(f, 0.0)};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < f; ++c) stats.mean[c] += train.features[r * f + c];
  }
  for (double& m : stats.mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < f; ++c) {
      const double d = train.features[r * f + c] - stats.mean[c];
      stats.stddev[c] += d * d;
    }
  }
  for (double& s : stats.stddev) s = std::sqrt(s / static_cast<double>(n));
  return stats;
}

void apply_normalization(Dataset& ds, const NormStats& stats) {
  const std::size_t f = ds.cols();
  if (stats.mean.size() != f || stats.stddev.size() != f) {
    throw InputError("normalization statistics cover " + std::to_string(stats.mean.size()) +
                     " features, dataset has " + std::to_string(f));
  }
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    for (std::size_t c = 0; c < f; ++c) {
      double& v = ds.features[r * f + c];
      v -= stats.mean[c];
      if (stats.stddev[c] > 0.0) v /= stats.stddev[c];
    }
  }
}

Normalized normalize(const Dataset& train, const Dataset& test) {
  Normalized out{train, test, fit_normalization(train)};
  apply_normalization(out.train, out.stats);
  apply_normalization(out.test, out.stats);
  return out;
}

// ---------------------------------------------------------------- synthetic

Schema synth_schema(std::size_t num_features) {
  Schema s;
  s.label_column = "fraud_bool";
  s.month_column = "month";
  s.sensitive_columns = {{kAge, "customer_age"}, {kIncome, "income"},
                         {kEmployment, "employment_status"}};
  for (std::size_t i = 0; i < num_features; ++i) s.feature_columns.push_back("f" + std::to_string(i));
  return s;
}

namespace {

// Draws an attribute value; side > 0 forces the high side of its cut,
// side < 0 the low side, 0 the full range.
double draw_attribute(const std::string& attr, int side, std::mt19937_64& rng) {
  if (attr == kAge) {
    const int lo = side > 0 ? 50 : 18;
    const int hi = side < 0 ? 49 : 90;
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  }
  if (attr == kIncome) {
    const double lo = side > 0 ? 0.5 : 0.1;
    const double hi = side < 0 ? 0.5 : 0.9;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  const int lo = side > 0 ? 3 : 0;
  const int hi = side < 0 ? 2 : 6;
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Marks exactly `count` of `pool` as positive.
void plant_labels(std::vector<std::size_t> pool, std::size_t count, std::vector<int>& labels,
                  std::mt19937_64& rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  for (std::size_t i = 0; i < count; ++i) labels[pool[i]] = 1;
}

}  // namespace

Dataset synth_generate(const SynthSpec& spec) {
  if (!(spec.prevalence > 0.0 && spec.prevalence < 1.0)) {
    throw GenerationError("prevalence must lie in (0, 1)");
  }
  for (std::size_t j : spec.planted) {
    if (j >= spec.num_features) {
      throw GenerationError("planted feature " + std::to_string(j) + " is outside 0.." +
                            std::to_string(spec.num_features - 1));
    }
  }
  const std::size_t n = spec.rows;
  std::mt19937_64 rng(spec.seed);
  Dataset ds = {};
  ds.labels.assign(n, 0);
  ds.month.resize(n);
  const std::vector<std::string> attrs = {kAge, kIncome, kEmployment};

  std::vector<int> side(n, 0);
  if (spec.group_bias) {
    const GroupBias& gb = *spec.group_bias;
    if (std::find(attrs.begin(), attrs.end(), gb.attribute) == attrs.end()) {
      throw GenerationError("unknown group_bias attribute '" + gb.attribute + "'");
    }
    std::bernoulli_distribution minority(gb.minority_fraction);
    std::vector<std::size_t> hi_rows;
    std::vector<std::size_t> lo_rows;
    for (std::size_t i = 0; i < n; ++i) {
      side[i] = minority(rng) ? 1 : -1;
      (side[i] > 0 ? hi_rows : lo_rows).push_back(i);
    }
    const auto k_hi = static_cast<std::size_t>(std::llround(hi_rows.size() * gb.minority_prevalence));
    const auto k_lo = static_cast<std::size_t>(std::llround(lo_rows.size() * gb.majority_prevalence));
    if (k_hi + k_lo == 0) throw GenerationError("too few rows to contain a positive");
    plant_labels(hi_rows, k_hi, ds.labels, rng);
    plant_labels(lo_rows, k_lo, ds.labels, rng);
  } else {
    const auto k = static_cast<std::size_t>(std::llround(static_cast<double>(n) * spec.prevalence));
    if (k == 0) {
      throw GenerationError(std::to_string(n) + " rows at prevalence " +
                            std::to_string(spec.prevalence) + " contain no positive");
    }
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    plant_labels(std::move(all), k, ds.labels, rng);
  }

  for (std::size_t i = 0; i < spec.num_features; ++i) ds.feature_names.push_back("f" + std::to_string(i));
  ds.features.resize(n * spec.num_features);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> month(0, 7);
  for (const auto& a : attrs) ds.sensitive[a].resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    double* row = ds.features.data() + r * spec.num_features;
    for (std::size_t c = 0; c < spec.num_features; ++c) row[c] = normal(rng);
    if (ds.labels[r] == 1) {
      for (std::size_t j : spec.planted) row[j] += spec.shift;
    }
    ds.month[r] = month(rng);
    for (const auto& a : attrs) {
      const bool biased = spec.group_bias && spec.group_bias->attribute == a;
      ds.sensitive[a][r] = draw_attribute(a, biased ? side[r] : 0, rng);
    }
  }
  return ds;
}

}  // namespace spikeguard::dataio
