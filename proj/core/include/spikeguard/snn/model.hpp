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
#include <span>
#include <vector>

#include "spikeguard/autodiff/ops.hpp"
#include "spikeguard/autodiff/tape.hpp"
#include "spikeguard/autodiff/tensor.hpp"

namespace spikeguard::snn {

using autodiff::Tensor;
using autodiff::TensorPtr;

inline constexpr std::array<std::size_t, 3> kConvFilters = {32, 128, 256};
inline constexpr std::size_t kKernel = 2;
inline constexpr std::size_t kLayers = 4;  // three conv blocks + output population

/// Architecture and neuron constants. Layer l (0-based) uses decay[l],
/// threshold[l]; layer 3 is the output population.
struct ModelConfig {
  std::size_t population = 20;
  std::size_t timesteps = 20;
  std::size_t num_features = 30;
  std::array<double, kLayers> decay = {0.5, 0.5, 0.5, 0.5};
  std::array<double, kLayers> threshold = {1.0, 1.0, 1.0, 1.0};
  double slope = 10.0;

  /// Throws ConfigError listing every violated invariant.
  void validate() const;

  autodiff::LifParams lif(std::size_t layer) const {
    return {decay.at(layer), threshold.at(layer), slope};
  }
};

/// Lengths along the feature axis: input, then conv/pool output of each
/// block. For 30 features: 30, 29, 14, 13, 6, 5, 2.
std::vector<std::size_t> length_chain(std::size_t num_features);

/// Width of the flattened block-3 spike map fed to the output projection.
std::size_t flat_features(const ModelConfig& config);

struct ModelParams {
  TensorPtr conv1_w, conv1_b;
  TensorPtr conv2_w, conv2_b;
  TensorPtr conv3_w, conv3_b;
  TensorPtr fc_w, fc_b;

  std::array<TensorPtr, 8> all() const {
    return {conv1_w, conv1_b, conv2_w, conv2_b, conv3_w, conv3_b, fc_w, fc_b};
  }
  static constexpr std::array<const char*, 8> kNames = {
      "conv1.weight", "conv1.bias", "conv2.weight", "conv2.bias",
      "conv3.weight", "conv3.bias", "fc.weight",    "fc.bias"};

  /// Deep copy (values only, no gradients).
  ModelParams clone() const;
  void zero_grad() const;
  void set_requires_grad(bool on) const;
};

/// Seeded He-uniform weights (bound sqrt(6 / fan_in)), zero biases.
ModelParams build(const ModelConfig& config, std::uint64_t seed);

/// Exact number of scalar weights and biases.
std::size_t count_params(const ModelParams& params);

struct ForwardOptions {
  autodiff::SpikeFn spike_fn = autodiff::SpikeFn::kHeaviside;
  /// Keep per-layer spike and membrane maps for every step. Output-layer
  /// spikes and currents are always kept.
  bool record_layers = false;
};

/// Per-step outputs of one simulated sample.
struct ForwardRecord {
  std::size_t timesteps = 0;
  std::size_t population = 0;
  Tensor currents;    // [T, P] input current of the output population
  Tensor out_spikes;  // [T, P]
  /// Layer maps, populated with ForwardOptions::record_layers. Index l holds
  /// a [T, ...] tensor for layer l.
  std::vector<Tensor> spikes;
  std::vector<Tensor> membranes;
  /// Per-class population spike totals [n0, n1], differentiable on the tape
  /// the forward pass was recorded on.
  TensorPtr counts;
};

/// Simulates T steps with the same input injected every step. x: [1, F].
ForwardRecord forward(const ModelParams& params, const ModelConfig& config, const TensorPtr& x,
                      autodiff::Tape& tape, const ForwardOptions& options = {});

/// Convenience overload for inference: nothing is recorded.
ForwardRecord forward(const ModelParams& params, const ModelConfig& config,
                      std::span<const double> features, const ForwardOptions& options = {});

struct Decoded {
  int predicted = 0;
  std::array<double, 2> counts = {0.0, 0.0};
  double fraud_score = 0.5;
};

/// Population decode: class 0 owns neurons [0, P/2), class 1 owns
/// [P/2, P). Ties go to class 0. fraud_score = (n1 + 1) / (n0 + n1 + 2).
Decoded decode(const ForwardRecord& record, std::size_t population);
Decoded decode_counts(double n0, double n1);

/// Weighted spike-count cross-entropy on the record's count pair.
TensorPtr loss(autodiff::Tape& tape, const ForwardRecord& record, int label,
               const std::array<double, 2>& class_weights);

}  // namespace spikeguard::snn
