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

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "spikeguard/search/hyper_config.hpp"
#include "spikeguard/train/metrics.hpp"

namespace spikeguard::search {

inline constexpr std::size_t kNumStates = 5;
inline constexpr std::size_t kNumActions = 10;

/// Recall - FPR, +1 when accuracy > 0.95, -0.5 when positives exist but
/// none were caught.
double reward(const train::EvalMetrics& m);

/// reward(m) + weight * pe. Off by default in every caller (weight 0).
double fairness_reward(const train::EvalMetrics& m, double pe, double weight);

struct QTable {
  std::array<std::array<double, kNumActions>, kNumStates> q{};

  double max_row(std::size_t state) const;
  friend bool operator==(const QTable&, const QTable&) = default;
};

/// Search phase of trial t out of T: floor(t / T * 5), clamped to 4.
std::size_t state_of(std::size_t t, std::size_t budget);

/// Epsilon-greedy over one Q row; greedy ties go to the lowest index.
std::size_t select_action(std::span<const double> q_row, double epsilon, Rng& rng);

inline constexpr double kAlpha = 0.1;
inline constexpr double kGamma = 0.9;

/// q[s][a] += alpha * (r + gamma * max_a' q[s_next][a'] - q[s][a]).
void q_update(QTable& table, std::size_t s, std::size_t a, double r, std::size_t s_next,
              double alpha = kAlpha, double gamma = kGamma);

/// max(0.05, epsilon * 0.99).
double decay_epsilon(double epsilon);

struct TrialResult {
  HyperConfig config;
  double reward = 0.0;
  train::EvalMetrics metrics;
  std::size_t trial_index = 0;
  std::size_t action = 0;
  std::size_t state = 0;
  double epsilon = 1.0;  // exploration rate used to pick `action`
  bool failed = false;
};

/// Metrics plus the reward the search should maximise.
struct TrialScore {
  train::EvalMetrics metrics;
  double reward = 0.0;
};

using MetricsEvaluator = std::function<train::EvalMetrics(const HyperConfig&)>;
using ScoredEvaluator = std::function<TrialScore(const HyperConfig&)>;

struct SearchOptions {
  double epsilon_start = 1.0;
  double alpha = kAlpha;
  double gamma = kGamma;
  /// Called after each trial; `new_best` is true when it replaced the best.
  std::function<void(const TrialResult&, bool new_best)> on_trial;
};

struct SearchResult {
  TrialResult best;
  std::vector<TrialResult> trials;  // trial 0 is the initial sample
  QTable q;
};

inline constexpr double kFailedReward = -1.0;

/// Tabular Q-learning hyper-heuristic. Trial 0 samples the prior; trials
/// 1..budget pick a heuristic epsilon-greedily in the current phase and
/// apply it to the best configuration so far (heuristic 0 resamples). A
/// trial whose evaluator throws gets reward -1 and never becomes best.
SearchResult optimize(std::size_t budget, const ScoredEvaluator& evaluator, std::uint64_t seed,
                      const SearchOptions& options = {});

/// Same, scoring each trial with reward(metrics).
SearchResult optimize(std::size_t budget, const MetricsEvaluator& evaluator, std::uint64_t seed,
                      const SearchOptions& options = {});

/// Baseline: budget + 1 independent prior samples, best kept.
SearchResult random_search(std::size_t budget, const ScoredEvaluator& evaluator,
                           std::uint64_t seed);

}  // namespace spikeguard::search
