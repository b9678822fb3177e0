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
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "spikeguard/dataio/dataset.hpp"
#include "spikeguard/snn/model.hpp"
#include "spikeguard/train/metrics.hpp"

namespace spikeguard::train {

struct ClassWeights {
  std::array<double, 2> weights = {1.0, 1.0};
  /// Set when one class is absent; that class then gets weight 1.
  bool missing_class = false;
};

/// Inverse-frequency weights w_c = n / (2 n_c), mean 1 on balanced data.
ClassWeights class_weights(std::span<const int> labels);

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 128;
  double lr = 1e-3;
  double adam_beta1 = 0.98;
  double adam_beta2 = 0.98;
  double omega = 1.0;
  /// 0 disables early stopping.
  std::size_t early_stop_patience = 0;
  double target_fpr = 0.05;
  std::uint64_t rng_seed = 0;
  /// Overrides the inverse-frequency weights when set.
  std::optional<std::array<double, 2>> class_weights;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  /// Threshold calibrated on the validation scores at the target FPR.
  double threshold = 0.0;
  EvalMetrics val;
};

struct TrainResult {
  snn::ModelParams params;
  std::vector<EpochRecord> history;
  std::array<double, 2> class_weights = {1.0, 1.0};
  bool missing_class = false;
  /// Epoch whose parameters were returned (0 = untouched input).
  std::size_t best_epoch = 0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Mini-batch surrogate-gradient training with Adam. Each epoch visits the
/// training rows in a seeded shuffle; the batch loss is the mean weighted
/// loss of its samples. With early stopping the parameters of the epoch
/// with the best validation recall (at the calibrated threshold) are
/// returned; otherwise the final parameters. `params` is not modified.
TrainResult train(const snn::ModelParams& params, const snn::ModelConfig& config,
                  const dataio::Dataset& train_set, const dataio::Dataset& val_set,
                  const TrainConfig& tc, const EpochCallback& on_epoch = {});

/// fraud_score of every row, in row order.
std::vector<double> score(const snn::ModelParams& params, const snn::ModelConfig& config,
                          const dataio::Dataset& data);

/// Mean weighted loss over `data` without updating anything.
double mean_loss(const snn::ModelParams& params, const snn::ModelConfig& config,
                 const dataio::Dataset& data, const std::array<double, 2>& class_weights);

EvalMetrics evaluate(const snn::ModelParams& params, const snn::ModelConfig& config,
                     const dataio::Dataset& data, double threshold = 0.5);

}  // namespace spikeguard::train
