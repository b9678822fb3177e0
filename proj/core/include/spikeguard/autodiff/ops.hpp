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

#include "spikeguard/autodiff/tape.hpp"
#include "spikeguard/autodiff/tensor.hpp"

namespace spikeguard::autodiff {

/// Leaky integrate-and-fire constants shared by one layer.
struct LifParams {
  double beta = 0.9;    // membrane decay, in (0, 1)
  double theta = 1.0;   // firing threshold, > 0
  double sigma = 10.0;  // surrogate slope, > 0

  /// Throws ConfigError naming the violated bound.
  void validate() const;
};

/// How the forward pass turns a membrane potential into a spike.
///
/// kHeaviside is the model proper. kSmooth replaces the step with
/// 0.5 + (u - theta) / (1 + sigma |u - theta|), whose exact derivative is
/// the surrogate; it exists so that finite differences can check the
/// backward pass, which is identical in both modes.
enum class SpikeFn { kHeaviside, kSmooth };

/// Valid 1-D convolution, stride 1. x: [C_in, L], w: [C_out, C_in, K],
/// b: [C_out] -> [C_out, L - K + 1].
TensorPtr conv1d(Tape& tape, const TensorPtr& x, const TensorPtr& w, const TensorPtr& b);

/// A conv weight paired with its [C_in * K, C_out] transpose. Packing once
/// and reusing it across time steps keeps the inner loops contiguous; the
/// transpose is itself a recorded op, so gradients reach `weight`.
struct ConvWeight {
  TensorPtr weight;
  TensorPtr packed;
};

ConvWeight pack_conv_weight(Tape& tape, const TensorPtr& w);
TensorPtr conv1d(Tape& tape, const TensorPtr& x, const ConvWeight& w, const TensorPtr& b);

/// Kernel 2, stride 2 max pooling over the last axis of [C, L]. A trailing
/// odd element is dropped; ties route the gradient to the earlier index.
TensorPtr maxpool1d(Tape& tape, const TensorPtr& x);

/// y = w x + b. x is read as a flat vector of w.dim(1) elements, so any
/// row-major shape with the right element count is accepted.
TensorPtr linear(Tape& tape, const TensorPtr& x, const TensorPtr& w, const TensorPtr& b);

/// Copy with a new shape of identical element count.
TensorPtr reshape(Tape& tape, const TensorPtr& x, Shape shape);

TensorPtr add(Tape& tape, const TensorPtr& a, const TensorPtr& b);
TensorPtr scale(Tape& tape, const TensorPtr& x, double factor);

/// Splits the flat input into `groups` equal contiguous blocks and sums
/// each block -> [groups].
TensorPtr group_sum(Tape& tape, const TensorPtr& x, std::size_t groups);

struct LifOutput {
  TensorPtr spikes;
  TensorPtr membrane;
};

/// One LIF update with subtractive reset:
///   u = beta * u_prev + I - s_prev * theta,  s = [u >= theta].
/// Backward differentiates the recurrence exactly and substitutes
/// surrogate_grad for the derivative of the spike step.
LifOutput lif_step(Tape& tape, const TensorPtr& current, const TensorPtr& u_prev,
                   const TensorPtr& s_prev, const LifParams& p,
                   SpikeFn spike_fn = SpikeFn::kHeaviside);

/// Fast-sigmoid derivative 1 / (1 + sigma |u - theta|)^2, elementwise.
Tensor surrogate_grad(const Tensor& u, const LifParams& p);
double surrogate_grad(double u, const LifParams& p);

/// weights[label] * -log softmax(counts)[label] for a 2-class count pair.
TensorPtr weighted_ce(Tape& tape, const TensorPtr& counts, int label, const Tensor& weights);

}  // namespace spikeguard::autodiff
