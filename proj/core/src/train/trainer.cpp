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

#include "spikeguard/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "spikeguard/autodiff/adam.hpp"
#include "spikeguard/autodiff/tape.hpp"
#include "spikeguard/errors.hpp"

namespace spikeguard::train {

using autodiff::make_tensor;
using autodiff::Tape;

ClassWeights class_weights(std::span<const int> labels) {
  if (labels.empty()) throw InputError("class_weights: no labels");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t negatives = labels.size() - positives;
  const double total = static_cast<double>(labels.size());
  ClassWeights cw;
  const std::array<std::size_t, 2> counts = {negatives, positives};
  for (std::size_t c = 0; c < 2; ++c) {
    if (counts[c] == 0) {
      cw.weights[c] = 1.0;
      cw.missing_class = true;
    } else {
      cw.weights[c] = total / (2.0 * static_cast<double>(counts[c]));
    }
  }
  return cw;
}

namespace {

void check_shape(const dataio::Dataset& data, const snn::ModelConfig& config, const char* what) {
  if (data.rows() == 0) throw InputError(std::string(what) + " set is empty");
  if (data.cols() != config.num_features) {
    throw DimensionError(std::string(what) + " set has " + std::to_string(data.cols()) +
                         " features, model expects " + std::to_string(config.num_features));
  }
}

EpochRecord validate_epoch(const snn::ModelParams& params, const snn::ModelConfig& config,
                           const dataio::Dataset& val, double target_fpr) {
  EpochRecord rec;
  const auto scores = score(params, config, val);
  try {
    rec.threshold = calibrate_threshold(scores, val.labels, target_fpr);
  } catch (const CalibrationError&) {
    rec.threshold = 0.5;
  }
  rec.val = confusion(scores, val.labels, rec.threshold);
  return rec;
}

}  // namespace

TrainResult train(const snn::ModelParams& params, const snn::ModelConfig& config,
                  const dataio::Dataset& train_set, const dataio::Dataset& val_set,
                  const TrainConfig& tc, const EpochCallback& on_epoch) {
  config.validate();
  check_shape(train_set, config, "training");
  check_shape(val_set, config, "validation");
  if (tc.batch_size == 0) throw ConfigError("batch_size must be positive");

  TrainResult result;
  if (tc.class_weights) {
    result.class_weights = *tc.class_weights;
  } else {
    const auto cw = class_weights(train_set.labels);
    result.class_weights = cw.weights;
    result.missing_class = cw.missing_class;
  }
  result.params = params.clone();
  if (tc.epochs == 0) return result;

  snn::ModelParams& p = result.params;
  p.set_requires_grad(true);
  const auto tensors = p.all();
  autodiff::AdamState adam;
  const autodiff::AdamConfig adam_cfg{tc.lr, tc.adam_beta1, tc.adam_beta2, tc.omega};

  std::mt19937_64 rng(tc.rng_seed);
  std::vector<std::size_t> order(train_set.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t features = config.num_features;

  std::optional<snn::ModelParams> best;
  double best_recall = -1.0;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= tc.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
      const std::size_t stop = std::min(order.size(), start + tc.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(stop - start);
      p.zero_grad();
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t r = order[k];
        const auto row = train_set.row(r);
        Tape tape;
        auto x = make_tensor({1, features}, std::vector<double>(row.begin(), row.end()));
        const auto rec = snn::forward(p, config, x, tape);
        const auto l = snn::loss(tape, rec, train_set.labels[r], result.class_weights);
        const double value = l->item();
        if (!std::isfinite(value)) {
          throw TrainingError(epoch, "training loss became non-finite in epoch " +
                                         std::to_string(epoch));
        }
        loss_sum += value;
        autodiff::backward(tape, autodiff::scale(tape, l, inv_batch));
      }
      autodiff::adam_step(tensors, adam, adam_cfg);
    }

    EpochRecord rec = validate_epoch(p, config, val_set, tc.target_fpr);
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (tc.early_stop_patience == 0) continue;
    if (rec.val.tpr > best_recall) {
      best_recall = rec.val.tpr;
      best = p.clone();
      result.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= tc.early_stop_patience) {
      break;
    }
  }

  if (best) {
    result.params = std::move(*best);
  } else {
    result.best_epoch = result.history.size();
  }
  for (const auto& t : result.params.all()) t->drop_grad();
  return result;
}

std::vector<double> score(const snn::ModelParams& params, const snn::ModelConfig& config,
                          const dataio::Dataset& data) {
  if (data.cols() != config.num_features) {
    throw DimensionError("dataset has " + std::to_string(data.cols()) +
                         " features, model expects " + std::to_string(config.num_features));
  }
  std::vector<double> scores(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto rec = snn::forward(params, config, data.row(r));
    scores[r] = snn::decode(rec, config.population).fraud_score;
  }
  return scores;
}

double mean_loss(const snn::ModelParams& params, const snn::ModelConfig& config,
                 const dataio::Dataset& data, const std::array<double, 2>& class_weights) {
  check_shape(data, config, "loss");
  double sum = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    Tape tape(false);
    const auto row = data.row(r);
    auto x = make_tensor({1, config.num_features}, std::vector<double>(row.begin(), row.end()));
    const auto rec = snn::forward(params, config, x, tape);
    sum += snn::loss(tape, rec, data.labels[r], class_weights)->item();
  }
  return sum / static_cast<double>(data.rows());
}

EvalMetrics evaluate(const snn::ModelParams& params, const snn::ModelConfig& config,
                     const dataio::Dataset& data, double threshold) {
  const auto scores = score(params, config, data);
  return confusion(scores, data.labels, threshold);
}

}  // namespace spikeguard::train
