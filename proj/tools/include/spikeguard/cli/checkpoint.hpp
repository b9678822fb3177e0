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
#include <string>
#include <vector>

#include "spikeguard/dataio/dataset.hpp"
#include "spikeguard/snn/model.hpp"

namespace spikeguard::cli {

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kBlobFile = "params.f32";

/// One entry of the tensor directory. Offsets and lengths are in bytes.
struct TensorEntry {
  std::string name;
  autodiff::Shape shape;
  std::size_t offset = 0;
  std::size_t length = 0;
};

/// Everything needed to score data the way the training run did.
struct Checkpoint {
  snn::ModelConfig model;
  snn::ModelParams params;
  std::string schema_hash;
  std::vector<std::string> feature_names;
  dataio::NormStats norm;
  double threshold = 0.5;
  double target_fpr = 0.05;
  int train_months = 6;
  std::uint64_t seed = 0;
};

/// Rounds every parameter to the nearest float, in place. Applied before a
/// run reports, so that reloading the checkpoint reproduces the report.
void quantize_f32(const snn::ModelParams& params);

/// Writes `<dir>/manifest.json` and `<dir>/params.f32` (little-endian
/// float32, tensors in ModelParams::all() order). Creates `dir`.
void save_checkpoint(const Checkpoint& ckpt, const std::string& dir);

/// Accepts the checkpoint directory or its manifest path. Throws
/// IntegrityError when the blob length or tensor directory disagrees with
/// the manifest, IoError when a file cannot be read.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace spikeguard::cli
