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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "spikeguard/train/metrics.hpp"

namespace spikeguard::fairness {

/// Binary grouping of one sensitive attribute: value >= cut is the high
/// group.
struct GroupSpec {
  std::string attribute;
  double cut = 0.0;
  std::string high_label;
  std::string low_label;
};

/// age >= 50 older/younger, income >= 0.5 rich/poor, employment >= 3
/// unstable/stable.
std::vector<GroupSpec> default_groups();
GroupSpec default_group(const std::string& attribute);

struct GroupMasks {
  std::vector<bool> high;
  std::vector<bool> low;
  /// One side is empty.
  bool degenerate = false;
};

GroupMasks partition(std::span<const double> values, const GroupSpec& spec);

/// min(a, b) / max(a, b); 1 when both are 0.
double predictive_equality(double fpr_a, double fpr_b);

/// alpha * tpr + (1 - alpha) * pe. Throws InputError for alpha outside [0, 1].
double tradeoff(double tpr, double pe, double alpha);

inline const std::vector<double> kDefaultAlphas = {0.0, 0.25, 0.5, 0.75, 1.0};

struct TradeoffPoint {
  double alpha = 0.0;
  double value = 0.0;
};

struct AttributeFairness {
  GroupSpec spec;
  train::EvalMetrics high;
  train::EvalMetrics low;
  double pe = 1.0;
  /// A group is empty or has no negatives, so its FPR is undefined.
  bool degenerate = false;
  std::vector<TradeoffPoint> tradeoffs;
};

struct FairnessReport {
  double tpr = 0.0;  // overall recall at the report threshold
  std::vector<AttributeFairness> attributes;
};

/// Per-attribute group confusion, PE and trade-off curve. `attrs` maps an
/// attribute name to per-row values; attributes without a GroupSpec in
/// `specs` are skipped.
FairnessReport fairness_report(std::span<const double> scores, std::span<const int> labels,
                               const std::map<std::string, std::vector<double>>& attrs,
                               double threshold, std::span<const double> alphas = kDefaultAlphas,
                               const std::vector<GroupSpec>& specs = default_groups());

}  // namespace spikeguard::fairness
