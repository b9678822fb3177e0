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

#include <cstdint>
#include <span>
#include <vector>

#include "spikeguard/autodiff/tensor.hpp"

namespace spikeguard::autodiff {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.98;
  double beta2 = 0.98;
  /// Multiplicative retention applied to the parameters before each step;
  /// 1 disables it.
  double weight = 1.0;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::int64_t step = 0;
};

/// One Adam update over `params`, reading each tensor's gradient buffer
/// (a tensor without one is treated as having zero gradient). Moment
/// buffers in `state` are sized on first use.
void adam_step(std::span<const TensorPtr> params, AdamState& state, const AdamConfig& cfg);

}  // namespace spikeguard::autodiff
