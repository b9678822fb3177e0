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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikeguard/cli/commands.hpp"
#include "spikeguard/cli/report.hpp"

namespace {

using spikeguard::cli::RunConfig;
using Command = int (*)(const RunConfig&, std::ostream&, std::ostream&);

// Flags are parsed into a scratch RunConfig; only the ones actually given
// are layered on top of the config file.
struct Flags {
  RunConfig values;
  std::string config_file;
  std::vector<std::pair<std::string, CLI::Option*>> given;
};

template <class T>
void flag(CLI::App* sub, Flags& f, const std::string& name, T& target, const std::string& help) {
  std::string key = name;
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  auto* opt = sub->add_option("--" + name, target, help);
  if constexpr (!std::is_same_v<T, std::string> && requires { target.begin(); }) {
    opt->delimiter(',');
  }
  f.given.emplace_back(key, opt);
}

void common_flags(CLI::App* sub, Flags& f) {
  RunConfig& v = f.values;
  sub->add_option("--config", f.config_file, "flat JSON run config (flags override it)");
  flag(sub, f, "data", v.data, "input CSV");
  flag(sub, f, "schema", v.schema, "schema JSON");
  flag(sub, f, "out", v.out, "output directory");
  flag(sub, f, "seed", v.seed, "master seed");
  flag(sub, f, "population", v.population, "output population size P (even)");
  flag(sub, f, "timesteps", v.timesteps, "simulation steps T");
  flag(sub, f, "target-fpr", v.target_fpr, "false-positive budget for the threshold");
  flag(sub, f, "alpha-grid", v.alpha_grid, "comma-separated trade-off weights");
  flag(sub, f, "train-months", v.train_months, "months before this one train; the rest is held out");
}

void training_flags(CLI::App* sub, Flags& f) {
  RunConfig& v = f.values;
  flag(sub, f, "epochs", v.epochs, "training epochs");
  flag(sub, f, "batch", v.batch, "mini-batch size");
  flag(sub, f, "patience", v.patience, "early-stopping patience in epochs (0 = off)");
  flag(sub, f, "hyper", v.hyper, "hyperparameter JSON (e.g. best_config.json)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spikeguard: spiking-network fraud detection"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app;
    Flags flags;
    Command run;
  };
  std::vector<Sub> subs(5);
  subs[0] = {app.add_subcommand("train", "train a model and report held-out metrics"), {},
             spikeguard::cli::cmd_train};
  subs[1] = {app.add_subcommand("optimize", "hyper-heuristic hyperparameter search"), {},
             spikeguard::cli::cmd_optimize};
  subs[2] = {app.add_subcommand("evaluate", "re-score held-out months with a checkpoint"), {},
             spikeguard::cli::cmd_evaluate};
  subs[3] = {app.add_subcommand("explain", "saliency and spike activity for chosen rows"), {},
             spikeguard::cli::cmd_explain};
  subs[4] = {app.add_subcommand("synth", "write a planted-signal synthetic data set"), {},
             spikeguard::cli::cmd_synth};

  for (auto& s : subs) common_flags(s.app, s.flags);
  training_flags(subs[0].app, subs[0].flags);
  training_flags(subs[1].app, subs[1].flags);
  {
    auto& f = subs[1].flags;
    RunConfig& v = f.values;
    flag(subs[1].app, f, "budget", v.budget, "search trials after the initial one");
    flag(subs[1].app, f, "rl-alpha", v.rl_alpha, "Q-learning rate");
    flag(subs[1].app, f, "rl-gamma", v.rl_gamma, "Q-learning discount");
    flag(subs[1].app, f, "epsilon-start", v.epsilon_start, "initial exploration rate");
  }
  for (int i : {2, 3}) {
    flag(subs[i].app, subs[i].flags, "checkpoint", subs[i].flags.values.checkpoint,
         "checkpoint directory or manifest");
  }
  flag(subs[3].app, subs[3].flags, "indices", subs[3].flags.values.indices,
       "comma-separated dataset row indices");
  {
    auto& f = subs[4].flags;
    RunConfig& v = f.values;
    flag(subs[4].app, f, "rows", v.rows, "rows to generate");
    flag(subs[4].app, f, "num-features", v.num_features, "feature columns");
    flag(subs[4].app, f, "prevalence", v.prevalence, "fraction of positives");
    flag(subs[4].app, f, "shift", v.shift, "mean shift of positives on planted features");
    flag(subs[4].app, f, "bias-attribute", v.bias_attribute,
         "age, income or employment: skew prevalence across that attribute's groups");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << nlohmann::json{{"error", {{"command", "parse"}, {"kind", "usage"},
                                           {"message", e.what()}}}}
                     .dump()
              << '\n';
    return 2;
  }

  for (auto& s : subs) {
    if (!s.app->parsed()) continue;
    RunConfig cfg;
    try {
      nlohmann::json overrides = nlohmann::json::object();
      const auto all = spikeguard::cli::to_json(s.flags.values);
      for (const auto& [key, opt] : s.flags.given) {
        if (opt->count() > 0) overrides[key] = all.at(key);
      }
      std::optional<std::string> file;
      if (!s.flags.config_file.empty()) file = s.flags.config_file;
      cfg = spikeguard::cli::resolve_config(file, overrides);
    } catch (const std::exception& e) {
      std::cerr << spikeguard::cli::error_record(s.app->get_name(), e).dump() << '\n';
      return 1;
    }
    return s.run(cfg, std::cout, std::cerr);
  }
  return 2;
}
