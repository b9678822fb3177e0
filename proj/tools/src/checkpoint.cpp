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

#include "spikeguard/cli/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

#include <json.hpp>

#include "spikeguard/cli/report.hpp"
#include "spikeguard/errors.hpp"

namespace spikeguard::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void put_f32(std::string& out, float v) {
  auto bits = std::bit_cast<std::uint32_t>(v);
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
}

float get_f32(const std::string& in, std::size_t pos) {
  std::uint32_t bits = 0;
  for (int b = 0; b < 4; ++b) {
    bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  }
  return std::bit_cast<float>(bits);
}

json model_json(const snn::ModelConfig& m) {
  return json{{"population", m.population}, {"timesteps", m.timesteps},
              {"num_features", m.num_features}, {"decay", m.decay},
              {"threshold", m.threshold},       {"slope", m.slope}};
}

snn::ModelConfig model_from_json(const json& j) {
  snn::ModelConfig m;
  m.population = j.at("population").get<std::size_t>();
  m.timesteps = j.at("timesteps").get<std::size_t>();
  m.num_features = j.at("num_features").get<std::size_t>();
  m.decay = j.at("decay").get<std::array<double, snn::kLayers>>();
  m.threshold = j.at("threshold").get<std::array<double, snn::kLayers>>();
  m.slope = j.at("slope").get<double>();
  return m;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open '" + p.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void quantize_f32(const snn::ModelParams& params) {
  for (const auto& t : params.all()) {
    for (double& v : t->data()) v = static_cast<double>(static_cast<float>(v));
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& dir) {
  fs::create_directories(dir);
  std::string blob;
  json tensors = json::array();
  const auto all = ckpt.params.all();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const std::size_t offset = blob.size();
    for (double v : all[i]->data()) put_f32(blob, static_cast<float>(v));
    tensors.push_back({{"name", snn::ModelParams::kNames[i]},
                       {"shape", all[i]->shape()},
                       {"offset", offset},
                       {"length", blob.size() - offset}});
  }
  json manifest{{"format", "spikeguard-checkpoint"},
                {"version", 1},
                {"created_by", "spikeguard"},
                {"seed", ckpt.seed},
                {"model", model_json(ckpt.model)},
                {"schema_hash", ckpt.schema_hash},
                {"feature_names", ckpt.feature_names},
                {"normalization", {{"mean", ckpt.norm.mean}, {"stddev", ckpt.norm.stddev}}},
                {"threshold", threshold_json(ckpt.threshold)},
                {"target_fpr", ckpt.target_fpr},
                {"train_months", ckpt.train_months},
                {"blob", kBlobFile},
                {"blob_bytes", blob.size()},
                {"dtype", "float32-le"},
                {"tensors", tensors}};
  write_atomic((fs::path(dir) / kBlobFile).string(), blob);
  write_atomic((fs::path(dir) / kManifestFile).string(), manifest.dump(2) + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
  fs::path manifest_path = path;
  if (fs::is_directory(manifest_path)) manifest_path /= kManifestFile;
  json m;
  try {
    m = json::parse(read_file(manifest_path));
  } catch (const json::exception& e) {
    throw IntegrityError("checkpoint manifest '" + manifest_path.string() +
                         "' is not valid JSON: " + e.what());
  }
  Checkpoint c;
  std::vector<TensorEntry> entries;
  std::string blob_name;
  try {
    if (m.at("format").get<std::string>() != "spikeguard-checkpoint") {
      throw IntegrityError("'" + manifest_path.string() + "' is not a spikeguard checkpoint");
    }
    c.model = model_from_json(m.at("model"));
    c.schema_hash = m.at("schema_hash").get<std::string>();
    c.feature_names = m.at("feature_names").get<std::vector<std::string>>();
    c.norm.mean = m.at("normalization").at("mean").get<std::vector<double>>();
    c.norm.stddev = m.at("normalization").at("stddev").get<std::vector<double>>();
    c.threshold = threshold_from_json(m.at("threshold"));
    c.target_fpr = m.at("target_fpr").get<double>();
    c.train_months = m.at("train_months").get<int>();
    c.seed = m.at("seed").get<std::uint64_t>();
    blob_name = m.at("blob").get<std::string>();
    for (const auto& t : m.at("tensors")) {
      entries.push_back({t.at("name").get<std::string>(), t.at("shape").get<autodiff::Shape>(),
                         t.at("offset").get<std::size_t>(), t.at("length").get<std::size_t>()});
    }
  } catch (const json::exception& e) {
    throw IntegrityError("checkpoint manifest '" + manifest_path.string() +
                         "' is malformed: " + e.what());
  }
  c.model.validate();

  const std::string blob = read_file(manifest_path.parent_path() / blob_name);
  std::size_t total = 0;
  for (const auto& e : entries) total += e.length;
  if (total != blob.size()) {
    throw IntegrityError("checkpoint blob is " + std::to_string(blob.size()) +
                         " bytes but the tensor directory lists " + std::to_string(total));
  }

  // shapes must match a freshly built model of the recorded config
  c.params = snn::build(c.model, 0);
  const auto all = c.params.all();
  if (entries.size() != all.size()) {
    throw IntegrityError("checkpoint lists " + std::to_string(entries.size()) +
                         " tensors, expected " + std::to_string(all.size()));
  }
  std::size_t expect_offset = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& e = entries[i];
    if (e.name != snn::ModelParams::kNames[i] || e.shape != all[i]->shape() ||
        e.offset != expect_offset || e.length != all[i]->size() * 4) {
      throw IntegrityError("checkpoint tensor '" + e.name + "' does not match the model layout");
    }
    auto data = all[i]->data();
    for (std::size_t k = 0; k < data.size(); ++k) {
      data[k] = static_cast<double>(get_f32(blob, e.offset + 4 * k));
    }
    expect_offset += e.length;
  }
  if (c.norm.mean.size() != c.model.num_features || c.norm.stddev.size() != c.model.num_features ||
      c.feature_names.size() != c.model.num_features) {
    throw IntegrityError("checkpoint normalization does not cover " +
                         std::to_string(c.model.num_features) + " features");
  }
  return c;
}

}  // namespace spikeguard::cli
