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

#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "spikeguard/cli/run_config.hpp"
#include "spikeguard/search/hyper_config.hpp"

namespace spikeguard::cli {

// Output file names inside RunConfig::out.
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kHistoryFile = "history.csv";
inline constexpr const char* kTrialsFile = "trials.csv";
inline constexpr const char* kQTableFile = "qtable.json";
inline constexpr const char* kBestConfigFile = "best_config.json";
inline constexpr const char* kExplanationsFile = "explanations.json";
inline constexpr const char* kImportanceFile = "feature_importance.csv";
inline constexpr const char* kCheckpointDir = "checkpoint";

/// defaults <- config file (if any) <- flag overrides.
RunConfig resolve_config(const std::optional<std::string>& config_file,
                         const nlohmann::json& flag_overrides);

nlohmann::json hyper_to_json(const search::HyperConfig& h);
/// Missing keys keep their defaults; unknown keys raise ConfigError.
search::HyperConfig hyper_from_json(const nlohmann::json& j);
search::HyperConfig load_hyper(const std::string& path);

// Every command returns 0 iff all of its outputs were written. Failures
// print one JSON error record (see error_record) to `err` and return 1.

/// Split by month (last training month validates), train, calibrate the
/// threshold on validation, report on the held-out months. Writes
/// checkpoint/, metrics.json, history.csv.
int cmd_train(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Hyper-heuristic search; each trial trains and is scored on validation.
/// Writes best_config.json, trials.csv, qtable.json, checkpoint/ of the
/// best trial and its held-out metrics.json.
int cmd_optimize(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Re-scores the held-out months with a checkpoint. Writes metrics.json.
int cmd_evaluate(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Saliency and spike activity for dataset rows `cfg.indices`. Writes
/// explanations.json and feature_importance.csv.
int cmd_explain(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Planted-signal data set. Writes data.csv and schema.json.
int cmd_synth(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace spikeguard::cli
