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

#include "spikeguard/train/metrics.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "spikeguard/errors.hpp"

namespace spikeguard::train {

EvalMetrics from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  EvalMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.tn = tn;
  m.fn = fn;
  const std::size_t negatives = fp + tn;
  const std::size_t positives = tp + fn;
  m.no_negatives = negatives == 0;
  m.no_positives = positives == 0;
  if (negatives > 0) {
    m.fpr = static_cast<double>(fp) / static_cast<double>(negatives);
    m.tnr = static_cast<double>(tn) / static_cast<double>(negatives);
  }
  if (positives > 0) {
    m.tpr = static_cast<double>(tp) / static_cast<double>(positives);
    m.fnr = static_cast<double>(fn) / static_cast<double>(positives);
  }
  const std::size_t total = negatives + positives;
  if (total > 0) m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
  return m;
}

EvalMetrics confusion(std::span<const double> scores, std::span<const int> labels,
                      double threshold) {
  if (scores.size() != labels.size()) {
    throw InputError("confusion: " + std::to_string(scores.size()) + " scores but " +
                     std::to_string(labels.size()) + " labels");
  }
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool flagged = scores[i] >= threshold;
    if (labels[i] == 1) {
      (flagged ? tp : fn) += 1;
    } else {
      (flagged ? fp : tn) += 1;
    }
  }
  return from_counts(tp, fp, tn, fn);
}

double calibrate_threshold(std::span<const double> scores, std::span<const int> labels,
                           double target_fpr) {
  if (scores.size() != labels.size()) {
    throw InputError("calibrate_threshold: scores and labels differ in length");
  }
  if (!(target_fpr >= 0.0 && target_fpr <= 1.0)) {
    throw InputError("calibrate_threshold: target FPR must lie in [0, 1]");
  }
  std::vector<double> negatives;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) negatives.push_back(scores[i]);
  }
  if (negatives.empty()) {
    throw CalibrationError("cannot calibrate a threshold without negative instances");
  }
  // Descending: walking down, the candidate negatives[i] flags every
  // negative scoring >= it; the last feasible candidate is the smallest.
  std::sort(negatives.begin(), negatives.end(), std::greater<>());
  const double n = static_cast<double>(negatives.size());
  double best = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < negatives.size()) {
    const double candidate = negatives[i];
    std::size_t j = i;
    while (j < negatives.size() && negatives[j] == candidate) ++j;
    if (static_cast<double>(j) / n > target_fpr) break;
    best = candidate;
    i = j;
  }
  return best;
}

}  // namespace spikeguard::train
