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

#include "spikeguard/search/hyper_config.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikeguard/errors.hpp"

namespace spikeguard::search {

const std::array<FieldSpec, kNumFields>& field_specs() {
  static const std::array<FieldSpec, kNumFields> specs = {{
      {"decay1", 0.1, 0.95, Scale::kLog, FieldGroup::kDecay},
      {"decay2", 0.1, 0.95, Scale::kLog, FieldGroup::kDecay},
      {"decay3", 0.1, 0.95, Scale::kLog, FieldGroup::kDecay},
      {"decay4", 0.1, 0.95, Scale::kLog, FieldGroup::kDecay},
      {"slope", 10.0, 50.0, Scale::kLog, FieldGroup::kSlope},
      {"threshold1", 0.1, 1.0, Scale::kLog, FieldGroup::kThreshold},
      {"threshold2", 0.1, 1.0, Scale::kLog, FieldGroup::kThreshold},
      {"threshold3", 0.1, 1.0, Scale::kLog, FieldGroup::kThreshold},
      {"threshold4", 0.1, 1.0, Scale::kLog, FieldGroup::kThreshold},
      {"omega", 0.95, 1.0, Scale::kLog, FieldGroup::kOmega},
      {"adam_beta1", 0.97, 0.99, Scale::kLinear, FieldGroup::kAdamBetas},
      {"adam_beta2", 0.97, 0.99, Scale::kLinear, FieldGroup::kAdamBetas},
      {"lr", 1e-6, 1e-3, Scale::kLog, FieldGroup::kLearningRate},
  }};
  return specs;
}

double& field(HyperConfig& c, std::size_t index) {
  if (index < 4) return c.decay[index];
  if (index == 4) return c.slope;
  if (index < 9) return c.threshold[index - 5];
  switch (index) {
    case 9: return c.omega;
    case 10: return c.adam_beta1;
    case 11: return c.adam_beta2;
    case 12: return c.lr;
    default: throw InputError("hyper-config field index " + std::to_string(index) + " out of range");
  }
}

double field(const HyperConfig& c, std::size_t index) {
  return field(const_cast<HyperConfig&>(c), index);
}

void HyperConfig::apply(snn::ModelConfig& model) const {
  model.decay = decay;
  model.threshold = threshold;
  model.slope = slope;
}

void HyperConfig::apply(train::TrainConfig& tc) const {
  tc.lr = lr;
  tc.adam_beta1 = adam_beta1;
  tc.adam_beta2 = adam_beta2;
  tc.omega = omega;
}

void HyperConfig::validate() const {
  const auto& specs = field_specs();
  for (std::size_t i = 0; i < kNumFields; ++i) {
    const double v = field(*this, i);
    if (!(v >= specs[i].lo && v <= specs[i].hi)) {
      throw ConfigError(std::string(specs[i].name) + " = " + std::to_string(v) +
                        " lies outside [" + std::to_string(specs[i].lo) + ", " +
                        std::to_string(specs[i].hi) + "]");
    }
  }
}

namespace {

double draw_prior(const FieldSpec& spec, Rng& rng) {
  if (spec.scale == Scale::kLog) {
    std::uniform_real_distribution<double> u(std::log(spec.lo), std::log(spec.hi));
    return std::clamp(std::exp(u(rng)), spec.lo, spec.hi);
  }
  std::uniform_real_distribution<double> u(spec.lo, spec.hi);
  return u(rng);
}

double jitter(double value, const FieldSpec& spec, double s, Rng& rng) {
  const double noise = std::normal_distribution<double>(0.0, 1.0)(rng) * s;
  const double moved = spec.scale == Scale::kLog ? value * std::exp(noise)
                                                 : value + noise * (spec.hi - spec.lo);
  return std::clamp(moved, spec.lo, spec.hi);
}

bool in_group(const FieldSpec& spec, int llh) {
  switch (llh) {
    case 1: return spec.group == FieldGroup::kDecay;
    case 2: return spec.group == FieldGroup::kThreshold;
    case 3: return spec.group == FieldGroup::kSlope;
    case 4: return spec.group == FieldGroup::kLearningRate;
    case 5: return spec.group == FieldGroup::kAdamBetas;
    case 6: return spec.group == FieldGroup::kOmega;
    default: return false;
  }
}

}  // namespace

HyperConfig sample_initial(Rng& rng) {
  HyperConfig c;
  const auto& specs = field_specs();
  for (std::size_t i = 0; i < kNumFields; ++i) field(c, i) = draw_prior(specs[i], rng);
  return c;
}

HyperConfig perturb(const HyperConfig& base, int llh, Rng& rng, double jitter_scale) {
  if (llh < 1 || llh > 9) {
    throw InputError("low-level heuristic must be in 1..9 for perturbation, got " +
                     std::to_string(llh));
  }
  const auto& specs = field_specs();
  HyperConfig c = base;
  const double small = kSmallJitter * jitter_scale;
  if (llh <= 7) {
    for (std::size_t i = 0; i < kNumFields; ++i) {
      if (llh == 7 || in_group(specs[i], llh)) field(c, i) = jitter(field(c, i), specs[i], small, rng);
    }
    return c;
  }
  const std::size_t pick = std::uniform_int_distribution<std::size_t>(0, kNumFields - 1)(rng);
  if (llh == 8) {
    field(c, pick) = draw_prior(specs[pick], rng);
  } else {
    field(c, pick) = jitter(field(c, pick), specs[pick], kLargeJitter * jitter_scale, rng);
  }
  return c;
}

}  // namespace spikeguard::search
