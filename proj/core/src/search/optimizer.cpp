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

#include "spikeguard/search/optimizer.hpp"

#include <algorithm>
#include <string>

#include "spikeguard/errors.hpp"

namespace spikeguard::search {

double reward(const train::EvalMetrics& m) {
  double r = m.tpr - m.fpr;
  if (m.accuracy > 0.95) r += 1.0;
  if (m.tp == 0 && m.tp + m.fn > 0) r -= 0.5;
  return r;
}

double fairness_reward(const train::EvalMetrics& m, double pe, double weight) {
  return reward(m) + weight * pe;
}

double QTable::max_row(std::size_t state) const {
  const auto& row = q.at(state);
  return *std::max_element(row.begin(), row.end());
}

std::size_t state_of(std::size_t t, std::size_t budget) {
  if (budget == 0) throw InputError("state_of: budget must be positive");
  if (t > budget) throw InputError("state_of: trial index exceeds budget");
  const std::size_t s = (t * kNumStates) / budget;
  return std::min(s, kNumStates - 1);
}

std::size_t select_action(std::span<const double> q_row, double epsilon, Rng& rng) {
  if (q_row.empty()) throw InputError("select_action: empty Q row");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InputError("select_action: epsilon outside [0, 1]");
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon) {
    return std::uniform_int_distribution<std::size_t>(0, q_row.size() - 1)(rng);
  }
  return static_cast<std::size_t>(std::max_element(q_row.begin(), q_row.end()) - q_row.begin());
}

void q_update(QTable& table, std::size_t s, std::size_t a, double r, std::size_t s_next,
              double alpha, double gamma) {
  if (s >= kNumStates || s_next >= kNumStates) throw InputError("q_update: state out of range");
  if (a >= kNumActions) throw InputError("q_update: action out of range");
  double& cell = table.q[s][a];
  cell += alpha * (r + gamma * table.max_row(s_next) - cell);
}

double decay_epsilon(double epsilon) { return std::max(0.05, epsilon * 0.99); }

namespace {

TrialResult run_trial(const ScoredEvaluator& evaluator, const HyperConfig& config) {
  TrialResult trial;
  trial.config = config;
  try {
    const TrialScore score = evaluator(config);
    trial.metrics = score.metrics;
    trial.reward = score.reward;
  } catch (const std::exception&) {
    trial.failed = true;
    trial.reward = kFailedReward;
  }
  return trial;
}

ScoredEvaluator with_metric_reward(const MetricsEvaluator& evaluator) {
  return [evaluator](const HyperConfig& c) {
    const auto m = evaluator(c);
    return TrialScore{m, reward(m)};
  };
}

}  // namespace

SearchResult optimize(std::size_t budget, const ScoredEvaluator& evaluator, std::uint64_t seed,
                      const SearchOptions& options) {
  if (budget == 0) throw InputError("optimize: budget must be at least 1");
  Rng rng(seed);
  SearchResult result;
  double epsilon = options.epsilon_start;

  TrialResult initial = run_trial(evaluator, sample_initial(rng));
  initial.epsilon = epsilon;
  result.best = initial;
  result.trials.push_back(initial);
  if (options.on_trial) options.on_trial(initial, true);

  for (std::size_t t = 1; t <= budget; ++t) {
    const std::size_t state = state_of(t, budget);
    const std::size_t action = select_action(result.q.q[state], epsilon, rng);
    const HyperConfig candidate = action == 0
                                      ? sample_initial(rng)
                                      : perturb(result.best.config, static_cast<int>(action), rng);
    TrialResult trial = run_trial(evaluator, candidate);
    trial.trial_index = t;
    trial.action = action;
    trial.state = state;
    trial.epsilon = epsilon;

    // a failed initial sample holds best at the failure reward until a
    // trial beats it
    const bool improved = !trial.failed && trial.reward > result.best.reward;
    if (improved) result.best = trial;
    // the last trial looks ahead into the final phase
    const std::size_t next_state = state_of(std::min(t + 1, budget), budget);
    q_update(result.q, state, action, trial.reward, next_state, options.alpha, options.gamma);
    epsilon = decay_epsilon(epsilon);
    result.trials.push_back(trial);
    if (options.on_trial) options.on_trial(trial, improved);
  }
  return result;
}

SearchResult optimize(std::size_t budget, const MetricsEvaluator& evaluator, std::uint64_t seed,
                      const SearchOptions& options) {
  return optimize(budget, with_metric_reward(evaluator), seed, options);
}

SearchResult random_search(std::size_t budget, const ScoredEvaluator& evaluator,
                           std::uint64_t seed) {
  Rng rng(seed);
  SearchResult result;
  for (std::size_t t = 0; t <= budget; ++t) {
    TrialResult trial = run_trial(evaluator, sample_initial(rng));
    trial.trial_index = t;
    if (t == 0 || (!trial.failed && trial.reward > result.best.reward)) result.best = trial;
    result.trials.push_back(trial);
  }
  return result;
}

}  // namespace spikeguard::search
