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

#include "spikeguard/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "spikeguard/cli/checkpoint.hpp"
#include "spikeguard/cli/report.hpp"
#include "spikeguard/errors.hpp"
#include "spikeguard/fairness/fairness.hpp"
#include "spikeguard/search/optimizer.hpp"
#include "spikeguard/train/trainer.hpp"
#include "spikeguard/xai/explain.hpp"

namespace spikeguard::cli {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig resolve_config(const std::optional<std::string>& config_file,
                         const json& flag_overrides) {
  RunConfig cfg;
  if (config_file) apply_file(cfg, *config_file);
  apply_json(cfg, flag_overrides);
  cfg.validate();
  return cfg;
}

json hyper_to_json(const search::HyperConfig& h) {
  json j = json::object();
  const auto& specs = search::field_specs();
  for (std::size_t i = 0; i < search::kNumFields; ++i) j[std::string(specs[i].name)] = field(h, i);
  return j;
}

search::HyperConfig hyper_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("hyper config must be a JSON object");
  search::HyperConfig h;
  const auto& specs = search::field_specs();
  for (const auto& [key, value] : j.items()) {
    std::size_t i = 0;
    while (i < search::kNumFields && specs[i].name != key) ++i;
    if (i == search::kNumFields) throw ConfigError("hyper config: unknown field '" + key + "'");
    if (!value.is_number()) throw ConfigError("hyper config: field '" + key + "' is not a number");
    search::field(h, i) = value.get<double>();
  }
  h.validate();
  return h;
}

search::HyperConfig load_hyper(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open hyper config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("hyper config '" + path + "' is not valid JSON: " + e.what());
  }
  // best_config.json nests the fields under "config"
  return hyper_from_json(j.contains("config") ? j.at("config") : j);
}

namespace {

struct Loaded {
  dataio::Schema schema;
  std::string schema_hash;
  dataio::Dataset data;
};

Loaded load_inputs(const RunConfig& cfg) {
  if (cfg.schema.empty()) throw ConfigError("no schema given (--schema)");
  if (cfg.data.empty()) throw ConfigError("no data file given (--data)");
  Loaded l;
  l.schema = dataio::load_schema(cfg.schema);
  l.schema_hash = dataio::schema_hash(l.schema);
  l.data = dataio::load_csv(cfg.data, l.schema);
  return l;
}

/// fit = months < train_months - 1, val = month train_months - 1,
/// test = months >= train_months; normalized with fit statistics.
struct Prepared {
  Loaded in;
  dataio::Dataset fit;
  dataio::Dataset val;
  dataio::Dataset test;
  dataio::NormStats stats;
};

Prepared prepare(const RunConfig& cfg) {
  Prepared p;
  p.in = load_inputs(cfg);
  auto outer = dataio::temporal_split(p.in.data, cfg.train_months);
  auto inner = dataio::temporal_split(outer.train, cfg.train_months - 1);
  auto norm = dataio::normalize(inner.train, outer.test);
  p.fit = std::move(norm.train);
  p.test = std::move(norm.test);
  p.stats = std::move(norm.stats);
  p.val = std::move(inner.test);
  dataio::apply_normalization(p.val, p.stats);
  return p;
}

snn::ModelConfig model_config(const RunConfig& cfg, std::size_t num_features) {
  snn::ModelConfig mc;
  mc.population = cfg.population;
  mc.timesteps = cfg.timesteps;
  mc.num_features = num_features;
  return mc;
}

train::TrainConfig train_config(const RunConfig& cfg) {
  train::TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch;
  tc.early_stop_patience = cfg.patience;
  tc.target_fpr = cfg.target_fpr;
  tc.rng_seed = cfg.seed;
  return tc;
}

json held_out_report(const snn::ModelParams& params, const snn::ModelConfig& mc,
                     const dataio::Dataset& test, double threshold, const RunConfig& cfg) {
  const auto scores = train::score(params, mc, test);
  const auto m = train::confusion(scores, test.labels, threshold);
  const auto fr =
      fairness::fairness_report(scores, test.labels, test.sensitive, threshold, cfg.alpha_grid);
  return metrics_report(m, fr, threshold, cfg.target_fpr);
}

std::string out_path(const RunConfig& cfg, const char* name) {
  return (fs::path(cfg.out) / name).string();
}

std::string history_csv(const std::vector<train::EpochRecord>& history) {
  std::ostringstream os;
  os << "epoch,train_loss,threshold,val_fpr,val_recall,val_tnr,val_fnr,val_accuracy,"
        "val_tp,val_fp,val_tn,val_fn\n";
  for (const auto& r : history) {
    os << r.epoch << ',' << format_double(r.train_loss) << ',' << format_double(r.threshold)
       << ',' << format_double(r.val.fpr) << ',' << format_double(r.val.tpr) << ','
       << format_double(r.val.tnr) << ',' << format_double(r.val.fnr) << ','
       << format_double(r.val.accuracy) << ',' << r.val.tp << ',' << r.val.fp << ','
       << r.val.tn << ',' << r.val.fn << '\n';
  }
  return os.str();
}

std::string trials_csv(const std::vector<search::TrialResult>& trials) {
  std::ostringstream os;
  os << "trial,state,action,epsilon,failed,reward,tp,fp,tn,fn,fpr,recall,tnr,fnr,accuracy";
  for (const auto& f : search::field_specs()) os << ',' << f.name;
  os << '\n';
  for (const auto& t : trials) {
    const auto& m = t.metrics;
    os << t.trial_index << ',' << t.state << ',' << t.action << ',' << format_double(t.epsilon)
       << ',' << (t.failed ? 1 : 0) << ',' << format_double(t.reward) << ',' << m.tp << ','
       << m.fp << ',' << m.tn << ',' << m.fn << ',' << format_double(m.fpr) << ','
       << format_double(m.tpr) << ',' << format_double(m.tnr) << ',' << format_double(m.fnr)
       << ',' << format_double(m.accuracy);
    for (std::size_t i = 0; i < search::kNumFields; ++i) os << ',' << format_double(field(t.config, i));
    os << '\n';
  }
  return os.str();
}

/// Loads data with the checkpoint's schema check and normalization.
Loaded load_for_checkpoint(const RunConfig& cfg, const Checkpoint& ckpt) {
  Loaded in = load_inputs(cfg);
  if (in.schema_hash != ckpt.schema_hash) {
    throw IntegrityError("schema '" + cfg.schema + "' (hash " + in.schema_hash +
                         ") differs from the checkpoint's (hash " + ckpt.schema_hash + ")");
  }
  if (in.data.feature_names != ckpt.feature_names) {
    throw IntegrityError("data feature columns differ from the checkpoint's");
  }
  return in;
}

Checkpoint require_checkpoint(const RunConfig& cfg) {
  if (cfg.checkpoint.empty()) throw ConfigError("no checkpoint given (--checkpoint)");
  return load_checkpoint(cfg.checkpoint);
}

int guarded(const char* command, std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    err << error_record(command, e).dump() << '\n';
    return 1;
  }
}

}  // namespace

int cmd_train(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded("train", err, [&] {
    cfg.validate();
    const Prepared p = prepare(cfg);
    auto mc = model_config(cfg, p.fit.cols());
    auto tc = train_config(cfg);
    if (!cfg.hyper.empty()) {
      const auto h = load_hyper(cfg.hyper);
      h.apply(mc);
      h.apply(tc);
    }
    const auto init = snn::build(mc, cfg.seed);
    log << "train: " << p.fit.rows() << " fit rows, " << p.val.rows() << " validation rows, "
        << p.test.rows() << " held-out rows, " << snn::count_params(init) << " parameters\n";
    const auto result = train::train(init, mc, p.fit, p.val, tc, [&](const train::EpochRecord& r) {
      log << "  epoch " << r.epoch << " loss " << r.train_loss << " val recall " << r.val.tpr
          << " val fpr " << r.val.fpr << '\n';
    });
    quantize_f32(result.params);
    const auto val_scores = train::score(result.params, mc, p.val);
    const double threshold = train::calibrate_threshold(val_scores, p.val.labels, cfg.target_fpr);
    const json report = held_out_report(result.params, mc, p.test, threshold, cfg);

    Checkpoint ckpt{mc,        result.params, p.in.schema_hash, p.fit.feature_names,
                    p.stats,   threshold,     cfg.target_fpr,   cfg.train_months,
                    cfg.seed};
    save_checkpoint(ckpt, out_path(cfg, kCheckpointDir));
    write_atomic(out_path(cfg, kHistoryFile), history_csv(result.history));
    write_atomic(out_path(cfg, kMetricsFile), report.dump(2) + "\n");
    log << "train: held-out recall " << report["recall"].get<double>() << " at fpr "
        << report["fpr"].get<double>() << " -> " << out_path(cfg, kMetricsFile) << '\n';
  });
}

int cmd_optimize(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded("optimize", err, [&] {
    cfg.validate();
    const Prepared p = prepare(cfg);
    const auto base_mc = model_config(cfg, p.fit.cols());
    const auto base_tc = train_config(cfg);

    struct Trained {
      snn::ModelParams params;
      snn::ModelConfig mc;
      double threshold = 0.5;
    };
    Trained last;
    Trained best;
    bool have_best = false;

    const search::MetricsEvaluator evaluate = [&](const search::HyperConfig& h) {
      auto mc = base_mc;
      auto tc = base_tc;
      h.apply(mc);
      h.apply(tc);
      auto result = train::train(snn::build(mc, cfg.seed), mc, p.fit, p.val, tc);
      quantize_f32(result.params);
      const auto scores = train::score(result.params, mc, p.val);
      const double thr = train::calibrate_threshold(scores, p.val.labels, cfg.target_fpr);
      last = {result.params, mc, thr};
      return train::confusion(scores, p.val.labels, thr);
    };
    search::SearchOptions opts;
    opts.alpha = cfg.rl_alpha;
    opts.gamma = cfg.rl_gamma;
    opts.epsilon_start = cfg.epsilon_start;
    opts.on_trial = [&](const search::TrialResult& t, bool new_best) {
      log << "  trial " << t.trial_index << " llh " << t.action << " reward "
          << (t.failed ? std::string("failed") : std::to_string(t.reward))
          << (new_best ? " (best)" : "") << '\n';
      if (new_best && !t.failed) {
        best = last;
        have_best = true;
      }
    };
    log << "optimize: budget " << cfg.budget << ", " << p.fit.rows() << " fit rows\n";
    const auto res = search::optimize(cfg.budget, evaluate, cfg.seed, opts);
    if (!have_best) throw TrainingError(0, "every optimization trial failed");

    json best_json{{"trial", res.best.trial_index},
                   {"reward", res.best.reward},
                   {"validation", metrics_json(res.best.metrics)},
                   {"config", hyper_to_json(res.best.config)}};
    json q = json::array();
    for (const auto& row : res.q.q) q.push_back(row);
    json qtable{{"states", search::kNumStates},
                {"actions", search::kNumActions},
                {"alpha", cfg.rl_alpha},
                {"gamma", cfg.rl_gamma},
                {"q", q}};
    const json report = held_out_report(best.params, best.mc, p.test, best.threshold, cfg);

    Checkpoint ckpt{best.mc,  best.params,     p.in.schema_hash, p.fit.feature_names,
                    p.stats,  best.threshold,  cfg.target_fpr,   cfg.train_months,
                    cfg.seed};
    save_checkpoint(ckpt, out_path(cfg, kCheckpointDir));
    write_atomic(out_path(cfg, kTrialsFile), trials_csv(res.trials));
    write_atomic(out_path(cfg, kQTableFile), qtable.dump(2) + "\n");
    write_atomic(out_path(cfg, kBestConfigFile), best_json.dump(2) + "\n");
    write_atomic(out_path(cfg, kMetricsFile), report.dump(2) + "\n");
    log << "optimize: best trial " << res.best.trial_index << " reward " << res.best.reward
        << " -> " << out_path(cfg, kBestConfigFile) << '\n';
  });
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded("evaluate", err, [&] {
    cfg.validate();
    const Checkpoint ckpt = require_checkpoint(cfg);
    Loaded in = load_for_checkpoint(cfg, ckpt);
    auto test = dataio::temporal_split(in.data, ckpt.train_months).test;
    dataio::apply_normalization(test, ckpt.norm);
    const json report = held_out_report(ckpt.params, ckpt.model, test, ckpt.threshold, cfg);
    write_atomic(out_path(cfg, kMetricsFile), report.dump(2) + "\n");
    log << "evaluate: recall " << report["recall"].get<double>() << " at fpr "
        << report["fpr"].get<double>() << " -> " << out_path(cfg, kMetricsFile) << '\n';
  });
}

int cmd_explain(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded("explain", err, [&] {
    cfg.validate();
    const Checkpoint ckpt = require_checkpoint(cfg);
    Loaded in = load_for_checkpoint(cfg, ckpt);
    if (cfg.indices.empty()) throw ConfigError("no sample indices given (--indices)");
    for (std::size_t i : cfg.indices) {
      if (i >= in.data.rows()) {
        throw InputError("sample index " + std::to_string(i) + " is out of range (" +
                         std::to_string(in.data.rows()) + " rows)");
      }
    }
    dataio::apply_normalization(in.data, ckpt.norm);

    json records = json::array();
    std::vector<std::vector<double>> samples;
    std::vector<int> labels;
    for (std::size_t i : cfg.indices) {
      const auto row = in.data.row(i);
      const int label = in.data.labels[i];
      const auto e = xai::explain(ckpt.params, ckpt.model, row, label);
      const auto d = snn::decode_counts(e.activity.per_class[0], e.activity.per_class[1]);
      records.push_back({{"index", i},
                         {"label", label},
                         {"predicted", e.predicted},
                         {"fraud_score", d.fraud_score},
                         {"flagged", d.fraud_score >= ckpt.threshold},
                         {"saliency", e.saliency},
                         {"activity",
                          {{"per_neuron", e.activity.per_neuron},
                           {"per_class", e.activity.per_class}}}});
      samples.emplace_back(row.begin(), row.end());
      labels.push_back(label);
    }
    const auto importance = xai::aggregate_importance(ckpt.params, ckpt.model, samples, labels);
    std::ostringstream csv;
    csv << "feature,importance\n";
    for (std::size_t j = 0; j < importance.size(); ++j) {
      csv << ckpt.feature_names[j] << ',' << format_double(importance[j]) << '\n';
    }
    write_atomic(out_path(cfg, kExplanationsFile),
                 json{{"feature_names", ckpt.feature_names}, {"samples", records}}.dump(2) + "\n");
    write_atomic(out_path(cfg, kImportanceFile), csv.str());
    log << "explain: " << cfg.indices.size() << " samples -> " << out_path(cfg, kExplanationsFile)
        << '\n';
  });
}

int cmd_synth(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  return guarded("synth", err, [&] {
    dataio::SynthSpec spec;
    spec.rows = cfg.rows;
    spec.prevalence = cfg.prevalence;
    spec.num_features = cfg.num_features;
    spec.shift = cfg.shift;
    spec.seed = cfg.seed;
    if (!cfg.bias_attribute.empty()) {
      dataio::GroupBias bias;
      bias.attribute = cfg.bias_attribute;
      spec.group_bias = bias;
    }
    const auto ds = dataio::synth_generate(spec);
    const auto schema = dataio::synth_schema(cfg.num_features);
    fs::create_directories(cfg.out);
    const std::string data_path = out_path(cfg, "data.csv");
    const std::string schema_path = out_path(cfg, "schema.json");
    dataio::save_csv(ds, schema, data_path + ".tmp");
    dataio::save_schema(schema, schema_path + ".tmp");
    fs::rename(data_path + ".tmp", data_path);
    fs::rename(schema_path + ".tmp", schema_path);
    log << "synth: " << ds.rows() << " rows, " << ds.positives() << " positives -> " << data_path
        << '\n';
  });
}

}  // namespace spikeguard::cli
