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

#include "spikeguard/cli/run_config.hpp"

#include <fstream>
#include <functional>
#include <map>

#include "spikeguard/errors.hpp"

namespace spikeguard::cli {

using nlohmann::json;

namespace {

using Setter = std::function<void(RunConfig&, const json&)>;

template <class T>
Setter set(T RunConfig::*member) {
  return [member](RunConfig& cfg, const json& v) { cfg.*member = v.get<T>(); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"data", set(&RunConfig::data)},
      {"schema", set(&RunConfig::schema)},
      {"out", set(&RunConfig::out)},
      {"checkpoint", set(&RunConfig::checkpoint)},
      {"hyper", set(&RunConfig::hyper)},
      {"seed", set(&RunConfig::seed)},
      {"population", set(&RunConfig::population)},
      {"timesteps", set(&RunConfig::timesteps)},
      {"epochs", set(&RunConfig::epochs)},
      {"batch", set(&RunConfig::batch)},
      {"patience", set(&RunConfig::patience)},
      {"target_fpr", set(&RunConfig::target_fpr)},
      {"train_months", set(&RunConfig::train_months)},
      {"budget", set(&RunConfig::budget)},
      {"rl_alpha", set(&RunConfig::rl_alpha)},
      {"rl_gamma", set(&RunConfig::rl_gamma)},
      {"epsilon_start", set(&RunConfig::epsilon_start)},
      {"alpha_grid", set(&RunConfig::alpha_grid)},
      {"indices", set(&RunConfig::indices)},
      {"rows", set(&RunConfig::rows)},
      {"num_features", set(&RunConfig::num_features)},
      {"prevalence", set(&RunConfig::prevalence)},
      {"shift", set(&RunConfig::shift)},
      {"bias_attribute", set(&RunConfig::bias_attribute)},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("run config: " + msg); };
  if (population == 0 || population % 2 != 0) fail("population must be a positive even integer");
  if (timesteps == 0) fail("timesteps must be positive");
  if (epochs == 0) fail("epochs must be positive");
  if (batch == 0) fail("batch must be positive");
  if (!(target_fpr >= 0.0 && target_fpr <= 1.0)) fail("target_fpr must lie in [0, 1]");
  if (train_months < 2) fail("train_months must be >= 2 (the last training month validates)");
  if (!(rl_alpha > 0.0 && rl_alpha <= 1.0)) fail("rl_alpha must lie in (0, 1]");
  if (!(rl_gamma >= 0.0 && rl_gamma < 1.0)) fail("rl_gamma must lie in [0, 1)");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) fail("epsilon_start must lie in [0, 1]");
  for (double a : alpha_grid) {
    if (!(a >= 0.0 && a <= 1.0)) fail("alpha_grid values must lie in [0, 1]");
  }
}

json to_json(const RunConfig& c) {
  return json{{"data", c.data},
              {"schema", c.schema},
              {"out", c.out},
              {"checkpoint", c.checkpoint},
              {"hyper", c.hyper},
              {"seed", c.seed},
              {"population", c.population},
              {"timesteps", c.timesteps},
              {"epochs", c.epochs},
              {"batch", c.batch},
              {"patience", c.patience},
              {"target_fpr", c.target_fpr},
              {"train_months", c.train_months},
              {"budget", c.budget},
              {"rl_alpha", c.rl_alpha},
              {"rl_gamma", c.rl_gamma},
              {"epsilon_start", c.epsilon_start},
              {"alpha_grid", c.alpha_grid},
              {"indices", c.indices},
              {"rows", c.rows},
              {"num_features", c.num_features},
              {"prevalence", c.prevalence},
              {"shift", c.shift},
              {"bias_attribute", c.bias_attribute}};
}

void apply_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  const auto& table = setters();
  for (const auto& [key, value] : j.items()) {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("run config: unknown key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const json::exception& e) {
      throw ConfigError("run config: bad value for '" + key + "': " + e.what());
    }
  }
}

void apply_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  apply_json(cfg, j);
}

}  // namespace spikeguard::cli
