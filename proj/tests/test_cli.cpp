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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "spikeguard/cli/checkpoint.hpp"
#include "spikeguard/cli/commands.hpp"
#include "spikeguard/cli/report.hpp"
#include "spikeguard/cli/run_config.hpp"
#include "spikeguard/errors.hpp"
#include "support/temp_dir.hpp"

using namespace spikeguard;
using namespace spikeguard::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Tiny synthetic data plus a config small enough to train in seconds.
RunConfig tiny_run(const fs::path& root) {
  RunConfig cfg;
  cfg.out = (root / "data").string();
  cfg.rows = 1600;
  cfg.prevalence = 0.06;
  cfg.num_features = 16;
  cfg.shift = 3.0;
  cfg.seed = 5;
  std::ostringstream log, err;
  REQUIRE(cmd_synth(cfg, log, err) == 0);
  cfg.data = (root / "data" / "data.csv").string();
  cfg.schema = (root / "data" / "schema.json").string();
  cfg.population = 4;
  cfg.timesteps = 4;
  cfg.epochs = 1;
  cfg.batch = 32;
  cfg.budget = 2;
  return cfg;
}

json error_of(const std::ostringstream& err) { return json::parse(err.str()); }

}  // namespace

TEST_CASE("run config layering and validation") {
  testing_support::TempDir dir;
  const auto file = dir.path() / "run.json";
  std::ofstream(file) << R"({"epochs": 5, "seed": 3, "alpha_grid": [0, 1]})";
  const auto cfg = resolve_config(file.string(), json{{"epochs", 7}});
  CHECK(cfg.epochs == 7);
  CHECK(cfg.seed == 3);
  CHECK(cfg.alpha_grid == std::vector<double>{0, 1});
  CHECK(cfg.population == 20);

  CHECK_THROWS_AS(resolve_config(std::nullopt, json{{"epochz", 1}}), ConfigError);
  CHECK_THROWS_AS(resolve_config(std::nullopt, json{{"epochs", "many"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config(std::nullopt, json{{"population", 3}}), ConfigError);
  CHECK_THROWS_AS(resolve_config(std::nullopt, json{{"train_months", 1}}), ConfigError);
  CHECK_THROWS_AS(resolve_config(std::nullopt, json{{"target_fpr", 1.5}}), ConfigError);
  CHECK_THROWS_AS(resolve_config(std::nullopt, json{{"alpha_grid", {0.5, 2.0}}}), ConfigError);
  CHECK_THROWS_AS(resolve_config((dir.path() / "nope.json").string(), json::object()),
                  ConfigError);

  RunConfig back;
  apply_json(back, to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
}

TEST_CASE("hyper config json") {
  search::HyperConfig h;
  h.lr = 2e-4;
  h.decay[2] = 0.3;
  const auto j = hyper_to_json(h);
  CHECK(j.at("lr") == 2e-4);
  CHECK(j.size() == search::kNumFields);
  search::HyperConfig partial = hyper_from_json(json{{"slope", 20.0}});
  CHECK(partial.slope == 20.0);
  CHECK(partial.lr == search::HyperConfig{}.lr);
  CHECK(hyper_from_json(j) == h);
  CHECK_THROWS_AS(hyper_from_json(json{{"speed", 1.0}}), ConfigError);
  CHECK_THROWS_AS(hyper_from_json(json{{"lr", 5.0}}), ConfigError);
}

TEST_CASE("report helpers") {
  CHECK(threshold_json(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(threshold_from_json(json("inf")) == std::numeric_limits<double>::infinity());
  CHECK(threshold_from_json(json(0.25)) == 0.25);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-7) == "1e-07");

  const auto m = train::from_counts(3, 1, 9, 1);
  fairness::FairnessReport fr;
  fr.tpr = m.tpr;
  const auto r = metrics_report(m, fr, 0.5, 0.05);
  CHECK(r.at("recall") == 0.75);
  CHECK(r.at("rows") == 14);
  CHECK(r.at("pe_age").is_null());

  const InputError e("bad index");
  const auto rec = error_record("explain", e);
  CHECK(rec.at("error").at("kind") == "input");
  CHECK(rec.at("error").at("command") == "explain");
  const IngestionError ie(12, "row 12 broken");
  CHECK(error_record("train", ie).at("error").at("row") == 12);
}

TEST_CASE("checkpoint round trip") {
  testing_support::TempDir dir;
  snn::ModelConfig mc;
  mc.population = 4;
  mc.timesteps = 5;
  mc.num_features = 16;
  Checkpoint ck;
  ck.model = mc;
  ck.params = snn::build(mc, 8);
  ck.schema_hash = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) ck.feature_names.push_back("f" + std::to_string(i));
  ck.norm.mean.assign(16, 0.5);
  ck.norm.stddev.assign(16, 2.0);
  ck.threshold = std::numeric_limits<double>::infinity();
  ck.train_months = 4;
  ck.seed = 99;
  quantize_f32(ck.params);
  save_checkpoint(ck, (dir.path() / "ck").string());

  const auto back = load_checkpoint((dir.path() / "ck").string());
  const auto via_manifest = load_checkpoint((dir.path() / "ck" / kManifestFile).string());
  CHECK(back.threshold == ck.threshold);
  CHECK(back.train_months == 4);
  CHECK(back.seed == 99);
  CHECK(back.schema_hash == ck.schema_hash);
  CHECK(back.feature_names == ck.feature_names);
  CHECK(back.norm.stddev == ck.norm.stddev);
  CHECK(back.model.population == 4);
  CHECK(back.model.decay == mc.decay);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(back.params.all()[i]->values() == ck.params.all()[i]->values());
    CHECK(via_manifest.params.all()[i]->shape() == ck.params.all()[i]->shape());
  }

  // a truncated blob is an integrity failure
  const auto blob = dir.path() / "ck" / kBlobFile;
  fs::resize_file(blob, fs::file_size(blob) - 4);
  CHECK_THROWS_AS(load_checkpoint((dir.path() / "ck").string()), IntegrityError);
  CHECK_THROWS_AS(load_checkpoint((dir.path() / "missing").string()), IoError);
}

TEST_CASE("quantize_f32 rounds to float") {
  snn::ModelConfig mc;
  mc.num_features = 16;
  mc.population = 2;
  const auto p = snn::build(mc, 1);
  (*p.fc_b)[0] = 0.1;
  quantize_f32(p);
  CHECK((*p.fc_b)[0] == static_cast<double>(0.1f));
  for (double v : p.conv2_w->values()) CHECK(v == static_cast<double>(static_cast<float>(v)));
}

TEST_CASE("train, evaluate and explain on a tiny data set") {
  testing_support::TempDir dir;
  auto cfg = tiny_run(dir.path());
  cfg.out = (dir.path() / "run").string();
  std::ostringstream log, err;
  REQUIRE(cmd_train(cfg, log, err) == 0);
  CHECK(err.str().empty());
  const auto metrics = json::parse(slurp(dir.path() / "run" / kMetricsFile));
  for (const char* key : {"recall", "fpr", "threshold", "pe_age", "pe_income", "pe_employment",
                          "tradeoffs", "groups"}) {
    CHECK(metrics.contains(key));
  }
  const auto history = slurp(dir.path() / "run" / kHistoryFile);
  CHECK(std::count(history.begin(), history.end(), '\n') == 2);

  auto ev = cfg;
  ev.out = (dir.path() / "eval").string();
  ev.checkpoint = (dir.path() / "run" / kCheckpointDir).string();
  fs::create_directories(ev.out);
  REQUIRE(cmd_evaluate(ev, log, err) == 0);
  CHECK(slurp(dir.path() / "eval" / kMetricsFile) == slurp(dir.path() / "run" / kMetricsFile));

  auto ex = ev;
  ex.out = (dir.path() / "explain").string();
  fs::create_directories(ex.out);
  ex.indices = {0, 3, 10};
  REQUIRE(cmd_explain(ex, log, err) == 0);
  const auto expl = json::parse(slurp(dir.path() / "explain" / kExplanationsFile));
  REQUIRE(expl.at("samples").size() == 3);
  for (const auto& s : expl.at("samples")) {
    CHECK(s.at("saliency").size() == 16);
    CHECK(s.at("activity").at("per_neuron").size() == 4);
  }
  const auto imp = slurp(dir.path() / "explain" / kImportanceFile);
  CHECK(std::count(imp.begin(), imp.end(), '\n') == 17);

  ex.indices = {999999};
  std::ostringstream err2;
  CHECK(cmd_explain(ex, log, err2) == 1);
  CHECK(error_of(err2).at("error").at("kind") == "input");
}

TEST_CASE("evaluate refuses a checkpoint from another schema") {
  testing_support::TempDir dir;
  auto cfg = tiny_run(dir.path());
  cfg.out = (dir.path() / "run").string();
  std::ostringstream log, err;
  REQUIRE(cmd_train(cfg, log, err) == 0);

  auto other = cfg;
  other.out = (dir.path() / "other").string();
  other.num_features = 17;
  REQUIRE(cmd_synth(other, log, err) == 0);
  auto ev = other;
  ev.data = (dir.path() / "other" / "data.csv").string();
  ev.schema = (dir.path() / "other" / "schema.json").string();
  ev.checkpoint = (dir.path() / "run" / kCheckpointDir).string();
  std::ostringstream e2;
  CHECK(cmd_evaluate(ev, log, e2) == 1);
  CHECK(error_of(e2).at("error").at("kind") == "integrity");
}

TEST_CASE("optimize writes its artifacts") {
  testing_support::TempDir dir;
  auto cfg = tiny_run(dir.path());
  cfg.out = (dir.path() / "opt").string();
  std::ostringstream log, err;
  REQUIRE(cmd_optimize(cfg, log, err) == 0);
  const auto trials = slurp(dir.path() / "opt" / kTrialsFile);
  CHECK(std::count(trials.begin(), trials.end(), '\n') == 4);
  const auto q = json::parse(slurp(dir.path() / "opt" / kQTableFile));
  CHECK(q.at("q").size() == 5);
  CHECK(q.at("q")[0].size() == 10);
  const auto best = json::parse(slurp(dir.path() / "opt" / kBestConfigFile));
  CHECK_NOTHROW(hyper_from_json(best.at("config")));
  CHECK(fs::exists(dir.path() / "opt" / kCheckpointDir / kManifestFile));

  // the best config feeds back into train
  auto tr = cfg;
  tr.out = (dir.path() / "retrain").string();
  tr.hyper = (dir.path() / "opt" / kBestConfigFile).string();
  CHECK(cmd_train(tr, log, err) == 0);
}

TEST_CASE("command failures produce one JSON error record") {
  testing_support::TempDir dir;
  RunConfig cfg;
  cfg.out = (dir.path() / "x").string();
  cfg.schema = (dir.path() / "missing-schema.json").string();
  cfg.data = (dir.path() / "missing.csv").string();
  std::ostringstream log, err;
  CHECK(cmd_train(cfg, log, err) == 1);
  const auto e = error_of(err);
  CHECK(e.at("error").at("command") == "train");
  CHECK(e.at("error").at("message").get<std::string>().find("missing-schema.json") !=
        std::string::npos);

  std::ostringstream err2;
  CHECK(cmd_evaluate(cfg, log, err2) == 1);
  CHECK(error_of(err2).at("error").at("kind") == "config");

  auto synth = cfg;
  synth.prevalence = 0.0;
  std::ostringstream err3;
  CHECK(cmd_synth(synth, log, err3) == 1);
  CHECK(error_of(err3).at("error").at("kind") == "generation");
}
