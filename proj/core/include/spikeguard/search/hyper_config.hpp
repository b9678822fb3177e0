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
#include <random>
#include <string_view>

#include "spikeguard/snn/model.hpp"
#include "spikeguard/train/trainer.hpp"

namespace spikeguard::search {

using Rng = std::mt19937_64;

/// One point of the 13-dimensional search space.
struct HyperConfig {
  std::array<double, 4> decay = {0.5, 0.5, 0.5, 0.5};
  double slope = 10.0;
  std::array<double, 4> threshold = {1.0, 1.0, 1.0, 1.0};
  double omega = 1.0;
  double adam_beta1 = 0.98;
  double adam_beta2 = 0.98;
  double lr = 1e-3;

  friend bool operator==(const HyperConfig&, const HyperConfig&) = default;

  /// Copies decays, thresholds and slope into a model config.
  void apply(snn::ModelConfig& model) const;
  /// Copies the optimizer fields into a training config.
  void apply(train::TrainConfig& tc) const;

  /// Throws ConfigError naming the first field outside its range.
  void validate() const;
};

enum class Scale { kLog, kLinear };

/// Which low-level heuristic targets a field.
enum class FieldGroup { kDecay, kThreshold, kSlope, kLearningRate, kAdamBetas, kOmega };

struct FieldSpec {
  std::string_view name;
  double lo;
  double hi;
  Scale scale;
  FieldGroup group;
};

inline constexpr std::size_t kNumFields = 13;

/// Field order: decay1..4, slope, threshold1..4, omega, adam_beta1,
/// adam_beta2, lr.
const std::array<FieldSpec, kNumFields>& field_specs();

double& field(HyperConfig& c, std::size_t index);
double field(const HyperConfig& c, std::size_t index);

/// Draws every field from its prior: log-uniform fields as
/// exp(U(ln lo, ln hi)), the rest as U(lo, hi).
HyperConfig sample_initial(Rng& rng);

inline constexpr double kSmallJitter = 0.1;
inline constexpr double kLargeJitter = 0.5;

/// Low-level heuristics 1..9 applied to `base`:
///   1 decays, 2 thresholds, 3 slope, 4 learning rate, 5 Adam betas,
///   6 omega (all with the small jitter), 7 small jitter of every field,
///   8 resample one random field from its prior, 9 large jitter of one
///   random field.
/// Jitter multiplies log-scale fields by exp(N(0, s)) and adds
/// N(0, s) * (hi - lo) to linear fields; results are clamped to range.
/// `jitter_scale` multiplies both jitter magnitudes (1 = nominal).
HyperConfig perturb(const HyperConfig& base, int llh, Rng& rng, double jitter_scale = 1.0);

}  // namespace spikeguard::search
