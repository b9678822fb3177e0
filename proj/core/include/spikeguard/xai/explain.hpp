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
#include <span>
#include <vector>

#include "spikeguard/snn/model.hpp"

namespace spikeguard::xai {

/// Total spikes per output neuron over the simulation window, and the same
/// totals summed per class population.
struct SpikeActivity {
  std::vector<double> per_neuron;
  std::array<double, 2> per_class = {0.0, 0.0};
};

struct Explanation {
  std::vector<double> saliency;  // |dL/dx| per input feature
  SpikeActivity activity;
  int predicted = 0;
};

/// |d CE(counts_T, y) / dx| with unweighted cross-entropy on the cumulative
/// class spike counts after the last step.
std::vector<double> saliency(const snn::ModelParams& params, const snn::ModelConfig& config,
                             std::span<const double> x, int y,
                             autodiff::SpikeFn spike_fn = autodiff::SpikeFn::kHeaviside);

SpikeActivity spike_activity(const snn::ModelParams& params, const snn::ModelConfig& config,
                             std::span<const double> x);

/// Saliency, activity and prediction from one shared forward pass.
Explanation explain(const snn::ModelParams& params, const snn::ModelConfig& config,
                    std::span<const double> x, int y);

/// Mean saliency per feature over `samples`, normalized to sum 1 (left
/// unnormalized when every saliency is zero). Each sample is explained
/// against its label when `labels` is given, otherwise against the
/// model's own prediction. Order-independent bit for bit.
std::vector<double> aggregate_importance(const snn::ModelParams& params,
                                         const snn::ModelConfig& config,
                                         std::span<const std::vector<double>> samples,
                                         std::span<const int> labels = {});

}  // namespace spikeguard::xai
