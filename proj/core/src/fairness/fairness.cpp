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

#include "spikeguard/fairness/fairness.hpp"

#include <algorithm>
#include <string>

#include "spikeguard/errors.hpp"

namespace spikeguard::fairness {

std::vector<GroupSpec> default_groups() {
  return {{"age", 50.0, "older", "younger"},
          {"income", 0.5, "rich", "poor"},
          {"employment", 3.0, "unstable", "stable"}};
}

GroupSpec default_group(const std::string& attribute) {
  for (auto& g : default_groups()) {
    if (g.attribute == attribute) return g;
  }
  throw InputError("no default grouping for attribute '" + attribute + "'");
}

GroupMasks partition(std::span<const double> values, const GroupSpec& spec) {
  GroupMasks m;
  m.high.resize(values.size());
  m.low.resize(values.size());
  std::size_t high_count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const bool high = values[i] >= spec.cut;
    m.high[i] = high;
    m.low[i] = !high;
    high_count += high ? 1 : 0;
  }
  m.degenerate = high_count == 0 || high_count == values.size();
  return m;
}

double predictive_equality(double fpr_a, double fpr_b) {
  const double hi = std::max(fpr_a, fpr_b);
  if (hi == 0.0) return 1.0;
  return std::min(fpr_a, fpr_b) / hi;
}

double tradeoff(double tpr, double pe, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw InputError("trade-off alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (alpha == 1.0) return tpr;
  if (alpha == 0.0) return pe;
  return alpha * tpr + (1.0 - alpha) * pe;
}

namespace {

train::EvalMetrics masked_confusion(std::span<const double> scores, std::span<const int> labels,
                                    const std::vector<bool>& mask, double threshold) {
  std::vector<double> s;
  std::vector<int> l;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    s.push_back(scores[i]);
    l.push_back(labels[i]);
  }
  return train::confusion(s, l, threshold);
}

}  // namespace

FairnessReport fairness_report(std::span<const double> scores, std::span<const int> labels,
                               const std::map<std::string, std::vector<double>>& attrs,
                               double threshold, std::span<const double> alphas,
                               const std::vector<GroupSpec>& specs) {
  if (scores.size() != labels.size()) {
    throw InputError("fairness_report: scores and labels differ in length");
  }
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw InputError("fairness_report: alpha outside [0, 1]");
  }
  FairnessReport report;
  report.tpr = train::confusion(scores, labels, threshold).tpr;
  for (const auto& spec : specs) {
    auto it = attrs.find(spec.attribute);
    if (it == attrs.end()) continue;
    if (it->second.size() != scores.size()) {
      throw InputError("fairness_report: attribute '" + spec.attribute + "' has " +
                       std::to_string(it->second.size()) + " values for " +
                       std::to_string(scores.size()) + " rows");
    }
    const GroupMasks masks = partition(it->second, spec);
    AttributeFairness af;
    af.spec = spec;
    af.high = masked_confusion(scores, labels, masks.high, threshold);
    af.low = masked_confusion(scores, labels, masks.low, threshold);
    af.degenerate = masks.degenerate || af.high.no_negatives || af.low.no_negatives;
    af.pe = predictive_equality(af.high.fpr, af.low.fpr);
    for (double a : alphas) af.tradeoffs.push_back({a, tradeoff(report.tpr, af.pe, a)});
    report.attributes.push_back(std::move(af));
  }
  return report;
}

}  // namespace spikeguard::fairness
