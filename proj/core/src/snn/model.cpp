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

#include "spikeguard/snn/model.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "spikeguard/errors.hpp"

namespace spikeguard::snn {

using autodiff::make_tensor;
using autodiff::Shape;
using autodiff::Tape;

void ModelConfig::validate() const {
  std::vector<std::string> problems;
  if (population == 0 || population % 2 != 0) {
    problems.push_back("population must be a positive even integer (got " +
                       std::to_string(population) + ")");
  }
  if (timesteps == 0) problems.push_back("timesteps must be positive");
  if (num_features < 15) {
    problems.push_back("num_features must be >= 15 so three conv/pool blocks leave length >= 1 "
                       "(got " + std::to_string(num_features) + ")");
  }
  for (std::size_t l = 0; l < kLayers; ++l) {
    if (!(decay[l] > 0.0 && decay[l] < 1.0)) {
      problems.push_back("decay[" + std::to_string(l) + "] must lie in (0, 1)");
    }
    if (!(threshold[l] > 0.0)) {
      problems.push_back("threshold[" + std::to_string(l) + "] must be > 0");
    }
  }
  if (!(slope > 0.0)) problems.push_back("slope must be > 0");
  if (!problems.empty()) {
    std::ostringstream os;
    os << "invalid model config:";
    for (const auto& p : problems) os << "\n  - " << p;
    throw ConfigError(os.str());
  }
}

std::vector<std::size_t> length_chain(std::size_t num_features) {
  std::vector<std::size_t> chain{num_features};
  std::size_t len = num_features;
  for (std::size_t block = 0; block < kConvFilters.size(); ++block) {
    len = len >= kKernel ? len - kKernel + 1 : 0;
    chain.push_back(len);
    len /= 2;
    chain.push_back(len);
  }
  return chain;
}

std::size_t flat_features(const ModelConfig& config) {
  return kConvFilters.back() * length_chain(config.num_features).back();
}

ModelParams ModelParams::clone() const {
  auto copy = [](const TensorPtr& t) {
    return make_tensor(t->shape(), t->values(), t->requires_grad());
  };
  return {copy(conv1_w), copy(conv1_b), copy(conv2_w), copy(conv2_b),
          copy(conv3_w), copy(conv3_b), copy(fc_w),    copy(fc_b)};
}

void ModelParams::zero_grad() const {
  for (const auto& t : all()) t->zero_grad();
}

void ModelParams::set_requires_grad(bool on) const {
  for (const auto& t : all()) t->set_requires_grad(on);
}

ModelParams build(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  auto he_uniform = [&rng](Shape shape, std::size_t fan_in) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto t = make_tensor(std::move(shape), true);
    for (double& v : t->data()) v = dist(rng);
    return t;
  };
  ModelParams p;
  std::size_t in_channels = 1;
  std::array<TensorPtr*, 3> weights = {&p.conv1_w, &p.conv2_w, &p.conv3_w};
  std::array<TensorPtr*, 3> biases = {&p.conv1_b, &p.conv2_b, &p.conv3_b};
  for (std::size_t b = 0; b < kConvFilters.size(); ++b) {
    const std::size_t filters = kConvFilters[b];
    *weights[b] = he_uniform({filters, in_channels, kKernel}, in_channels * kKernel);
    *biases[b] = make_tensor({filters}, true);
    in_channels = filters;
  }
  const std::size_t flat = flat_features(config);
  p.fc_w = he_uniform({config.population, flat}, flat);
  p.fc_b = make_tensor({config.population}, true);
  return p;
}

std::size_t count_params(const ModelParams& params) {
  std::size_t total = 0;
  for (const auto& t : params.all()) {
    if (t) total += t->size();
  }
  return total;
}

namespace {

void append_step(Tensor& dst, std::size_t t, const Tensor& src) {
  auto out = dst.data();
  const auto in = src.data();
  std::copy(in.begin(), in.end(), out.begin() + static_cast<std::ptrdiff_t>(t * in.size()));
}

Shape stacked(std::size_t steps, const Shape& inner) {
  Shape s{steps};
  s.insert(s.end(), inner.begin(), inner.end());
  return s;
}

}  // namespace

ForwardRecord forward(const ModelParams& params, const ModelConfig& config, const TensorPtr& x,
                      Tape& tape, const ForwardOptions& options) {
  if (x->rank() != 2 || x->dim(0) != 1 || x->dim(1) != config.num_features) {
    throw DimensionError("forward: input must have shape [1, " +
                         std::to_string(config.num_features) + "], got " +
                         autodiff::to_string(x->shape()));
  }
  const std::size_t steps = config.timesteps;
  const std::size_t pop = config.population;
  if (params.fc_w->dim(0) != pop) {
    throw DimensionError("forward: output projection has " + std::to_string(params.fc_w->dim(0)) +
                         " rows but population is " + std::to_string(pop));
  }

  // The input is the same every step, so the first conv/pool stage is
  // evaluated once and fanned out to every step.
  const TensorPtr drive = autodiff::maxpool1d(tape, autodiff::conv1d(tape, x, params.conv1_w,
                                                                    params.conv1_b));
  const std::array<autodiff::ConvWeight, 2> conv_w = {
      autodiff::pack_conv_weight(tape, params.conv2_w),
      autodiff::pack_conv_weight(tape, params.conv3_w)};
  const auto chain = length_chain(config.num_features);
  const std::array<Shape, kLayers> layer_shapes = {
      Shape{kConvFilters[0], chain[2]}, Shape{kConvFilters[1], chain[4]},
      Shape{kConvFilters[2], chain[6]}, Shape{pop}};

  std::array<TensorPtr, kLayers> u;
  std::array<TensorPtr, kLayers> s;
  for (std::size_t l = 0; l < kLayers; ++l) {
    u[l] = make_tensor(layer_shapes[l]);
    s[l] = make_tensor(layer_shapes[l]);
  }
  std::array<autodiff::LifParams, kLayers> lif;
  for (std::size_t l = 0; l < kLayers; ++l) lif[l] = config.lif(l);

  ForwardRecord rec;
  rec.timesteps = steps;
  rec.population = pop;
  rec.currents = Tensor({steps, pop});
  rec.out_spikes = Tensor({steps, pop});
  if (options.record_layers) {
    for (std::size_t l = 0; l < kLayers; ++l) {
      rec.spikes.emplace_back(stacked(steps, layer_shapes[l]));
      rec.membranes.emplace_back(stacked(steps, layer_shapes[l]));
    }
  }

  const std::array<const TensorPtr*, 2> conv_b = {&params.conv2_b, &params.conv3_b};
  for (std::size_t t = 0; t < steps; ++t) {
    TensorPtr current = drive;
    for (std::size_t l = 0; l < kLayers; ++l) {
      if (l == 1 || l == 2) {
        current = autodiff::maxpool1d(
            tape, autodiff::conv1d(tape, s[l - 1], conv_w[l - 1], *conv_b[l - 1]));
      } else if (l == 3) {
        current = autodiff::linear(tape, s[2], params.fc_w, params.fc_b);
        append_step(rec.currents, t, *current);
      }
      auto out = autodiff::lif_step(tape, current, u[l], s[l], lif[l], options.spike_fn);
      u[l] = std::move(out.membrane);
      s[l] = std::move(out.spikes);
      if (options.record_layers) {
        append_step(rec.spikes[l], t, *s[l]);
        append_step(rec.membranes[l], t, *u[l]);
      }
    }
    append_step(rec.out_spikes, t, *s[3]);
    auto step_counts = autodiff::group_sum(tape, s[3], 2);
    rec.counts = rec.counts ? autodiff::add(tape, rec.counts, step_counts) : step_counts;
  }
  return rec;
}

ForwardRecord forward(const ModelParams& params, const ModelConfig& config,
                      std::span<const double> features, const ForwardOptions& options) {
  Tape tape(false);
  auto x = make_tensor({1, features.size()}, std::vector<double>(features.begin(), features.end()));
  return forward(params, config, x, tape, options);
}

Decoded decode_counts(double n0, double n1) {
  Decoded d;
  d.counts = {n0, n1};
  d.predicted = n1 > n0 ? 1 : 0;
  d.fraud_score = (n1 + 1.0) / (n0 + n1 + 2.0);
  return d;
}

Decoded decode(const ForwardRecord& record, std::size_t population) {
  if (population == 0 || population % 2 != 0) {
    throw DimensionError("decode: population must be a positive even integer");
  }
  const auto& spikes = record.out_spikes;
  if (spikes.rank() != 2 || spikes.dim(1) != population) {
    throw DimensionError("decode: out_spikes width " +
                         (spikes.rank() == 2 ? std::to_string(spikes.dim(1)) : std::string("?")) +
                         " does not match population " + std::to_string(population));
  }
  const std::size_t half = population / 2;
  double n0 = 0.0;
  double n1 = 0.0;
  for (std::size_t t = 0; t < spikes.dim(0); ++t) {
    for (std::size_t i = 0; i < population; ++i) {
      const double v = spikes[t * population + i];
      (i < half ? n0 : n1) += v;
    }
  }
  return decode_counts(n0, n1);
}

TensorPtr loss(Tape& tape, const ForwardRecord& record, int label,
               const std::array<double, 2>& class_weights) {
  const Tensor weights({2}, {class_weights[0], class_weights[1]});
  return autodiff::weighted_ce(tape, record.counts, label, weights);
}

}  // namespace spikeguard::snn
