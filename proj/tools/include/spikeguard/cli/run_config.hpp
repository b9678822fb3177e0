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
#include <string>
#include <vector>

#include <json.hpp>

namespace spikeguard::cli {

/// Settings shared by every subcommand. Each field has a default; a
/// config file (flat JSON object, keys as below) overrides defaults and
/// command-line flags override the file.
struct RunConfig {
  // inputs and outputs
  std::string data;
  std::string schema;
  std::string out = "spikeguard-out";
  std::string checkpoint;
  std::string hyper;  // optional HyperConfig JSON (e.g. best_config.json)

  std::uint64_t seed = 0;

  // model
  std::size_t population = 20;
  std::size_t timesteps = 20;

  // training
  std::size_t epochs = 3;
  std::size_t batch = 128;
  std::size_t patience = 0;
  double target_fpr = 0.05;
  int train_months = 6;

  // search
  std::size_t budget = 10;
  double rl_alpha = 0.1;
  double rl_gamma = 0.9;
  double epsilon_start = 1.0;

  // reporting
  std::vector<double> alpha_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<std::size_t> indices;

  // synth
  std::size_t rows = 20000;
  std::size_t num_features = 30;
  double prevalence = 0.011;
  double shift = 2.0;
  std::string bias_attribute;  // empty: unbiased

  /// Throws ConfigError describing the first bad value.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Overwrites the fields named in `j`. Unknown keys and mistyped values
/// raise ConfigError.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

/// Reads a flat JSON object from `path` and applies it on top of `cfg`.
void apply_file(RunConfig& cfg, const std::string& path);

}  // namespace spikeguard::cli
