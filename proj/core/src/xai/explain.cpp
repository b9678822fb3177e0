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

#include "spikeguard/xai/explain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikeguard/errors.hpp"

namespace spikeguard::xai {

using autodiff::make_tensor;
using autodiff::Tape;

namespace {

SpikeActivity activity_of(const snn::ForwardRecord& rec) {
  SpikeActivity a;
  const std::size_t pop = rec.population;
  a.per_neuron.assign(pop, 0.0);
  for (std::size_t t = 0; t < rec.timesteps; ++t) {
    for (std::size_t i = 0; i < pop; ++i) a.per_neuron[i] += rec.out_spikes[t * pop + i];
  }
  for (std::size_t i = 0; i < pop; ++i) a.per_class[i < pop / 2 ? 0 : 1] += a.per_neuron[i];
  return a;
}

Explanation run(const snn::ModelParams& params, const snn::ModelConfig& config,
                std::span<const double> x, int y, autodiff::SpikeFn spike_fn) {
  if (x.size() != config.num_features) {
    throw DimensionError("explain: sample has " + std::to_string(x.size()) +
                         " features, model expects " + std::to_string(config.num_features));
  }
  // Work on a frozen copy so the caller's parameters never pick up grads.
  const snn::ModelParams frozen = params.clone();
  frozen.set_requires_grad(false);
  Tape tape;
  auto input = make_tensor({1, x.size()}, std::vector<double>(x.begin(), x.end()), true);
  snn::ForwardOptions opts;
  opts.spike_fn = spike_fn;
  const auto rec = snn::forward(frozen, config, input, tape, opts);
  const auto l = snn::loss(tape, rec, y, {1.0, 1.0});
  autodiff::backward(tape, l);

  Explanation e;
  e.saliency.assign(x.size(), 0.0);
  if (input->has_grad()) {
    const auto g = input->grad();
    for (std::size_t j = 0; j < x.size(); ++j) e.saliency[j] = std::abs(g[j]);
  }
  e.activity = activity_of(rec);
  e.predicted = snn::decode(rec, config.population).predicted;
  return e;
}

}  // namespace

std::vector<double> saliency(const snn::ModelParams& params, const snn::ModelConfig& config,
                             std::span<const double> x, int y, autodiff::SpikeFn spike_fn) {
  return run(params, config, x, y, spike_fn).saliency;
}

SpikeActivity spike_activity(const snn::ModelParams& params, const snn::ModelConfig& config,
                             std::span<const double> x) {
  if (x.size() != config.num_features) {
    throw DimensionError("spike_activity: sample has " + std::to_string(x.size()) +
                         " features, model expects " + std::to_string(config.num_features));
  }
  return activity_of(snn::forward(params, config, x));
}

Explanation explain(const snn::ModelParams& params, const snn::ModelConfig& config,
                    std::span<const double> x, int y) {
  return run(params, config, x, y, autodiff::SpikeFn::kHeaviside);
}

std::vector<double> aggregate_importance(const snn::ModelParams& params,
                                         const snn::ModelConfig& config,
                                         std::span<const std::vector<double>> samples,
                                         std::span<const int> labels) {
  if (samples.empty()) throw InputError("aggregate_importance: no samples");
  if (!labels.empty() && labels.size() != samples.size()) {
    throw InputError("aggregate_importance: labels and samples differ in length");
  }
  const std::size_t f = config.num_features;
  std::vector<std::vector<double>> columns(f);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    int target = 0;
    if (!labels.empty()) {
      target = labels[s];
    } else {
      target = snn::decode(snn::forward(params, config, samples[s]), config.population).predicted;
    }
    const auto sal = saliency(params, config, samples[s], target);
    for (std::size_t j = 0; j < f; ++j) columns[j].push_back(sal[j]);
  }
  // summing each column in sorted order makes the result independent of
  // sample order
  std::vector<double> mean(f, 0.0);
  for (std::size_t j = 0; j < f; ++j) {
    std::sort(columns[j].begin(), columns[j].end());
    double acc = 0.0;
    for (double v : columns[j]) acc += v;
    mean[j] = acc / static_cast<double>(samples.size());
  }
  double total = 0.0;
  for (double v : mean) total += v;
  if (total > 0.0) {
    for (double& v : mean) v /= total;
  }
  return mean;
}

}  // namespace spikeguard::xai
