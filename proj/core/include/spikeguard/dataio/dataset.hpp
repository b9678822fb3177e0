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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spikeguard::dataio {

/// Canonical names of the three sensitive attributes.
inline constexpr const char* kAge = "age";
inline constexpr const char* kIncome = "income";
inline constexpr const char* kEmployment = "employment";

/// Tabular binary-classification data. Features are row-major [n, F].
/// Sensitive attributes are kept raw (never normalized) so group cuts apply
/// to their natural units.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<int> month;
  std::map<std::string, std::vector<double>> sensitive;

  std::size_t rows() const noexcept { return labels.size(); }
  std::size_t cols() const noexcept { return feature_names.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * cols(), cols());
  }

  /// Rows at `indices`, in that order.
  Dataset select(std::span<const std::size_t> indices) const;
  std::size_t positives() const;

  /// Throws InputError when column lengths disagree or labels are not 0/1.
  void validate() const;
};

/// Column roles for CSV ingestion. `sensitive_columns` maps an attribute
/// name (age / income / employment) to its CSV column; a sensitive column
/// may also be listed as a feature.
struct Schema {
  std::string label_column = "fraud_bool";
  std::string month_column = "month";
  std::map<std::string, std::string> sensitive_columns;
  std::vector<std::string> feature_columns;
  std::map<std::string, std::map<std::string, int>> categorical_columns;

  /// Throws SchemaError when label/month/sensitive roles overlap.
  void validate() const;
};

Schema load_schema(const std::string& path);
void save_schema(const Schema& schema, const std::string& path);
std::string schema_to_json(const Schema& schema);
Schema schema_from_json(const std::string& text);

/// Stable FNV-1a digest of the canonical schema JSON, as 16 hex digits.
std::string schema_hash(const Schema& schema);

Dataset load_csv(const std::string& path, const Schema& schema);

/// Writes every column the schema names. Categorical columns are written
/// back as their category strings.
void save_csv(const Dataset& ds, const Schema& schema, const std::string& path);

struct Split {
  Dataset train;
  Dataset test;
};

/// train = rows with month < train_months, test = the rest, row order kept.
Split temporal_split(const Dataset& ds, int train_months);

struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // 0 marks a constant column (centered only)
};

NormStats fit_normalization(const Dataset& train);
void apply_normalization(Dataset& ds, const NormStats& stats);

struct Normalized {
  Dataset train;
  Dataset test;
  NormStats stats;
};

/// z-score with statistics fitted on `train` only.
Normalized normalize(const Dataset& train, const Dataset& test);

/// Per-group prevalence for biased synthetic data. Group membership is drawn
/// first (minority with probability `minority_fraction`); the sensitive
/// attribute is then drawn on the matching side of its default cut.
struct GroupBias {
  std::string attribute = kAge;
  double minority_fraction = 0.5;
  double minority_prevalence = 0.019;
  double majority_prevalence = 0.004;
};

struct SynthSpec {
  std::size_t rows = 20000;
  double prevalence = 0.011;
  std::size_t num_features = 30;
  std::vector<std::size_t> planted = {0, 1, 2, 3, 4};
  double shift = 2.0;
  std::optional<GroupBias> group_bias;
  std::uint64_t seed = 0;
};

/// Planted-signal generator: features ~ N(0, 1), positives shifted by
/// `shift` on the planted features; exactly round(rows * prevalence)
/// positives (per group under group_bias). Months uniform on 0..7.
Dataset synth_generate(const SynthSpec& spec);

/// Schema matching the columns synth_generate produces.
Schema synth_schema(std::size_t num_features);

}  // namespace spikeguard::dataio
