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
#include <span>

namespace spikeguard::train {

/// Confusion counts and the rates derived from them. A rate whose
/// denominator is zero is reported as 0 and flagged.
struct EvalMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  double fpr = 0.0;
  double tpr = 0.0;  // recall
  double tnr = 0.0;
  double fnr = 0.0;
  double accuracy = 0.0;
  bool no_negatives = false;
  bool no_positives = false;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
};

/// Rates from raw counts.
EvalMetrics from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn);

/// Positive prediction iff score >= threshold.
EvalMetrics confusion(std::span<const double> scores, std::span<const int> labels,
                      double threshold);

/// Smallest threshold among {negative scores} U {+inf} whose FPR does not
/// exceed `target_fpr`. Throws CalibrationError without negatives.
double calibrate_threshold(std::span<const double> scores, std::span<const int> labels,
                           double target_fpr);

}  // namespace spikeguard::train
