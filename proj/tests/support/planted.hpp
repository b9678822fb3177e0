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

#include <cmath>

#include "spikeguard/search/hyper_config.hpp"
#include "spikeguard/search/optimizer.hpp"

namespace testing_support {

/// Negative distance to `target` with every field mapped onto [0, 1] of its
/// range (log-scale fields in log space).
inline double planted_reward(const spikeguard::search::HyperConfig& c,
                             const spikeguard::search::HyperConfig& target) {
  namespace sr = spikeguard::search;
  const auto& specs = sr::field_specs();
  double sq = 0.0;
  for (std::size_t i = 0; i < sr::kNumFields; ++i) {
    auto unit = [&](double v) {
      if (specs[i].scale == sr::Scale::kLog) {
        return (std::log(v) - std::log(specs[i].lo)) / (std::log(specs[i].hi) - std::log(specs[i].lo));
      }
      return (v - specs[i].lo) / (specs[i].hi - specs[i].lo);
    };
    const double d = unit(sr::field(c, i)) - unit(sr::field(target, i));
    sq += d * d;
  }
  return -std::sqrt(sq);
}

inline spikeguard::search::ScoredEvaluator planted_evaluator(
    const spikeguard::search::HyperConfig& target) {
  return [target](const spikeguard::search::HyperConfig& c) {
    return spikeguard::search::TrialScore{{}, planted_reward(c, target)};
  };
}

}  // namespace testing_support
