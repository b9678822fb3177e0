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

#include "spikeguard/cli/report.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "spikeguard/dataio/dataset.hpp"
#include "spikeguard/errors.hpp"

namespace spikeguard::cli {

using nlohmann::json;

json threshold_json(double threshold) {
  if (std::isinf(threshold) && threshold > 0) return "inf";
  return threshold;
}

double threshold_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw IntegrityError("threshold string must be \"inf\"");
  }
  return j.get<double>();
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw IoError("failed while writing '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
  }
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, res.ptr};
}

json metrics_json(const train::EvalMetrics& m) {
  return json{{"tp", m.tp},         {"fp", m.fp},   {"tn", m.tn},   {"fn", m.fn},
              {"fpr", m.fpr},       {"recall", m.tpr}, {"tnr", m.tnr}, {"fnr", m.fnr},
              {"accuracy", m.accuracy}};
}

json metrics_report(const train::EvalMetrics& m, const fairness::FairnessReport& fr,
                    double threshold, double target_fpr) {
  json r = metrics_json(m);
  r["rows"] = m.total();
  r["threshold"] = threshold_json(threshold);
  r["target_fpr"] = target_fpr;
  for (const char* attr : {dataio::kAge, dataio::kIncome, dataio::kEmployment}) {
    r[std::string("pe_") + attr] = nullptr;
  }
  json tradeoffs = json::object();
  json groups = json::object();
  for (const auto& a : fr.attributes) {
    r["pe_" + a.spec.attribute] = a.pe;
    json curve = json::array();
    for (const auto& p : a.tradeoffs) curve.push_back({{"alpha", p.alpha}, {"value", p.value}});
    tradeoffs[a.spec.attribute] = curve;
    groups[a.spec.attribute] = {{"cut", a.spec.cut},
                                {"degenerate", a.degenerate},
                                {a.spec.high_label, metrics_json(a.high)},
                                {a.spec.low_label, metrics_json(a.low)}};
  }
  r["tradeoffs"] = tradeoffs;
  r["groups"] = groups;
  return r;
}

json error_record(const std::string& command, const std::exception& e) {
  json rec{{"command", command}, {"message", e.what()}};
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    rec["kind"] = err->kind();
    if (const auto* ie = dynamic_cast<const IngestionError*>(&e)) rec["row"] = ie->row();
    if (const auto* te = dynamic_cast<const TrainingError*>(&e)) rec["epoch"] = te->epoch();
  } else if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) {
    rec["kind"] = "io";
  } else {
    rec["kind"] = "internal";
  }
  return json{{"error", rec}};
}

}  // namespace spikeguard::cli
