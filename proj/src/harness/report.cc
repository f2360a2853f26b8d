// Copyright 2026 The ldpfo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "harness/report.h"

#include "json.hpp"

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace ldpfo {
namespace {

// Quotes a CSV field when it contains a separator, quote or newline.
std::string CsvField(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

nlohmann::json QueryJson(const QuerySpec& query) {
  nlohmann::json j;
  j["metric"] = MetricName(query.kind);
  switch (query.kind) {
    case QueryKind::kSet:
      j["rho"] = query.rho;
      break;
    case QueryKind::kTopK:
      j["k"] = query.k;
      break;
    case QueryKind::kFixedSets:
      j["sets"] = query.sets_source;
      j["set_count"] = query.sets.size();
      break;
    case QueryKind::kFull:
      break;
  }
  return j;
}

}  // namespace

std::string FormatCsv(const ExperimentResult& result) {
  std::string out = "method,metric,param,value,std\n";
  for (const MetricRecord& r : result.records) {
    absl::StrAppend(&out, MethodName(r.method), ",", CsvField(r.metric), ",",
                    CsvField(r.param), ",", absl::StrFormat("%.17g", r.value),
                    ",", absl::StrFormat("%.17g", r.std), "\n");
  }
  return out;
}

std::string FormatJson(const ExperimentResult& result) {
  const ExperimentConfig& c = result.config;
  nlohmann::json j;
  j["experiment"] = result.experiment;

  nlohmann::json config;
  config["dataset"] = c.dataset;
  config["d"] = c.data.d();
  config["n"] = c.data.n;
  config["epsilon"] = c.epsilon;
  config["oracle"] = std::string(ProtocolName(c.protocol));
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : c.methods) methods.push_back(std::string(MethodName(m)));
  config["methods"] = methods;
  config["repetitions"] = c.repetitions;
  config["alpha"] = c.alpha;
  config["grid_size"] = c.grid_size;
  config["threads"] = c.threads;
  config["set_samples"] = c.set_samples;
  nlohmann::json queries = nlohmann::json::array();
  for (const QuerySpec& q : c.queries) queries.push_back(QueryJson(q));
  config["queries"] = queries;
  j["config"] = config;
  j["seed"] = c.base_seed.value;
  j["metadata"] = result.metadata;
  if (result.selected) {
    j["selected_method"] = std::string(MethodName(*result.selected));
  }

  nlohmann::json summaries = nlohmann::json::array();
  for (const MethodSummary& s : result.methods) {
    nlohmann::json entry;
    entry["method"] = std::string(MethodName(s.method));
    entry["wall_time"] = s.wall_time;
    nlohmann::json metrics = nlohmann::json::array();
    for (const MetricRecord& r : result.records) {
      if (r.method != s.method) continue;
      metrics.push_back({{"metric", r.metric},
                         {"param", r.param},
                         {"value", r.value},
                         {"std", r.std}});
    }
    entry["metrics"] = metrics;
    if (!s.bias.empty()) entry["per_value_bias"] = s.bias;
    if (!s.variance.empty()) entry["per_value_variance"] = s.variance;
    summaries.push_back(entry);
  }
  j["methods"] = summaries;
  return j.dump(2) + "\n";
}

}  // namespace ldpfo
