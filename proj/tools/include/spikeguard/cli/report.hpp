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

#include <string>

#include <json.hpp>

#include "spikeguard/fairness/fairness.hpp"
#include "spikeguard/train/metrics.hpp"

namespace spikeguard::cli {

/// +inf (nothing is flagged) is written as the string "inf".
nlohmann::json threshold_json(double threshold);
double threshold_from_json(const nlohmann::json& j);

/// Writes to `<path>.tmp` and renames over `path`.
void write_atomic(const std::string& path, const std::string& content);

/// Shortest round-trip decimal form, for CSV cells.
std::string format_double(double v);

/// Report fields: rows, threshold, target_fpr, fpr, recall, tnr, fnr,
/// accuracy, tp, fp, tn, fn, pe_age, pe_income, pe_employment (null when
/// the attribute is absent), tradeoffs {attribute: [{alpha, value}]} and
/// per-group confusion under "groups".
nlohmann::json metrics_report(const train::EvalMetrics& m, const fairness::FairnessReport& fr,
                              double threshold, double target_fpr);

nlohmann::json metrics_json(const train::EvalMetrics& m);

/// {"error": {"command", "kind", "message"[, "row"][, "epoch"]}}
nlohmann::json error_record(const std::string& command, const std::exception& e);

}  // namespace spikeguard::cli
