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

#include "harness/metrics.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace ldpfo {

absl::StatusOr<FixedSets> ParseFixedSets(absl::string_view text, size_t d) {
  FixedSets sets;
  std::unordered_map<std::string, size_t> position;
  std::vector<std::unordered_set<uint32_t>> seen;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    absl::ConsumeSuffix(&line, "\r");
    if (line.empty()) continue;
    const size_t comma = line.rfind(',');
    if (comma == absl::string_view::npos) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": expected 'set_id,member_index'"));
    }
    std::string id(line.substr(0, comma));
    uint64_t member = 0;
    if (!absl::SimpleAtoi(line.substr(comma + 1), &member) || member >= d) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": member index must be an integer in [0, ",
          d, ")"));
    }
    auto [it, inserted] = position.try_emplace(id, sets.ids.size());
    if (inserted) {
      sets.ids.push_back(std::move(id));
      sets.members.emplace_back();
      seen.emplace_back();
    }
    if (seen[it->second].insert(static_cast<uint32_t>(member)).second) {
      sets.members[it->second].push_back(static_cast<uint32_t>(member));
    }
  }
  if (sets.size() == 0) {
    return absl::InvalidArgumentError("set file has no records");
  }
  return sets;
}

absl::StatusOr<FixedSets> LoadFixedSets(const std::string& path, size_t d) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open set file '", path, "'"));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<FixedSets> sets = ParseFixedSets(buffer.str(), d);
  if (!sets.ok()) {
    return absl::Status(sets.status().code(),
                        absl::StrCat(path, ": ", sets.status().message()));
  }
  return sets;
}

QuerySpec QuerySpec::Full() { return QuerySpec{}; }

QuerySpec QuerySpec::Set(double rho) {
  QuerySpec q;
  q.kind = QueryKind::kSet;
  q.rho = rho;
  return q;
}

QuerySpec QuerySpec::TopK(int64_t k) {
  QuerySpec q;
  q.kind = QueryKind::kTopK;
  q.k = k;
  return q;
}

QuerySpec QuerySpec::Fixed(FixedSets sets, std::string source) {
  QuerySpec q;
  q.kind = QueryKind::kFixedSets;
  q.sets = std::move(sets);
  q.sets_source = std::move(source);
  return q;
}

std::string MetricName(QueryKind kind) {
  switch (kind) {
    case QueryKind::kFull:
      return "mse_full";
    case QueryKind::kSet:
      return "mse_set";
    case QueryKind::kFixedSets:
      return "mse_fixed_sets";
    case QueryKind::kTopK:
      return "mse_topk";
  }
  return "mse";
}

std::string MetricParam(const QuerySpec& query) {
  switch (query.kind) {
    case QueryKind::kFull:
      return "";
    case QueryKind::kSet:
      return absl::StrCat(query.rho);
    case QueryKind::kFixedSets:
      return query.sets_source;
    case QueryKind::kTopK:
      return absl::StrCat(query.k);
  }
  return "";
}

absl::Status ValidateQuery(const QuerySpec& query, size_t d) {
  switch (query.kind) {
    case QueryKind::kFull:
      return absl::OkStatus();
    case QueryKind::kSet:
      if (!(query.rho > 0.0 && query.rho < 100.0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("rho must lie in (0, 100), got ", query.rho));
      }
      if (SubsetSize(query.rho, d) < 1) {
        return absl::InvalidArgumentError(absl::StrCat(
            "rho=", query.rho, " gives an empty subset for d=", d));
      }
      return absl::OkStatus();
    case QueryKind::kFixedSets:
      if (query.sets.size() == 0) {
        return absl::InvalidArgumentError("fixed-set query has no sets");
      }
      for (const auto& members : query.sets.members) {
        for (uint32_t m : members) {
          if (m >= d) {
            return absl::InvalidArgumentError(
                absl::StrCat("set member ", m, " outside domain of size ", d));
          }
        }
      }
      return absl::OkStatus();
    case QueryKind::kTopK:
      if (query.k < 1 || query.k > static_cast<int64_t>(d)) {
        return absl::InvalidArgumentError(
            absl::StrCat("k must lie in [1, ", d, "], got ", query.k));
      }
      return absl::OkStatus();
  }
  return absl::InvalidArgumentError("unknown query kind");
}

double QueryAnswer(const ProcessedEstimate& est,
                   std::span<const uint32_t> members) {
  double total = 0.0;
  for (uint32_t v : members) total += est.est[v];
  return est.clip_query_answers ? std::max(total, 0.0) : total;
}

double MseFull(const DomainDistribution& truth, const ProcessedEstimate& est) {
  double total = 0.0;
  for (size_t v = 0; v < truth.d(); ++v) {
    const double answer =
        est.clip_query_answers ? std::max(est.est[v], 0.0) : est.est[v];
    const double err = truth.freqs[v] - answer;
    total += err * err;
  }
  return total / static_cast<double>(truth.d());
}

int64_t SubsetSize(double rho, size_t d) {
  return static_cast<int64_t>(std::llround(rho * static_cast<double>(d) / 100.0));
}

std::vector<std::vector<uint32_t>> SampleSubsets(size_t d, int64_t size,
                                                 int samples, RngSeed seed) {
  SplitMix64 gen(seed);
  std::vector<uint32_t> pool(d);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<std::vector<uint32_t>> subsets;
  subsets.reserve(static_cast<size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    // Partial Fisher-Yates: the first `size` slots form a uniform subset.
    for (int64_t i = 0; i < size; ++i) {
      const size_t j = static_cast<size_t>(i) +
                       UniformIndex(gen, d - static_cast<size_t>(i));
      std::swap(pool[static_cast<size_t>(i)], pool[j]);
    }
    subsets.emplace_back(pool.begin(), pool.begin() + size);
  }
  return subsets;
}

double MseSets(const DomainDistribution& truth, const ProcessedEstimate& est,
               std::span<const std::vector<uint32_t>> sets) {
  if (sets.empty()) return 0.0;
  double total = 0.0;
  for (const auto& members : sets) {
    double true_answer = 0.0;
    for (uint32_t v : members) true_answer += truth.freqs[v];
    const double err = true_answer - QueryAnswer(est, members);
    total += err * err;
  }
  return total / static_cast<double>(sets.size());
}

absl::StatusOr<double> MseSet(const DomainDistribution& truth,
                              const ProcessedEstimate& est, double rho,
                              int samples, RngSeed seed) {
  const QuerySpec query = QuerySpec::Set(rho);
  if (absl::Status s = ValidateQuery(query, truth.d()); !s.ok()) return s;
  if (samples < 1) {
    return absl::InvalidArgumentError("need at least one subset sample");
  }
  const auto subsets =
      SampleSubsets(truth.d(), SubsetSize(rho, truth.d()), samples, seed);
  return MseSets(truth, est, subsets);
}

std::vector<uint32_t> TopKIndices(const DomainDistribution& truth, int64_t k) {
  std::vector<uint32_t> order(truth.d());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return truth.counts[a] > truth.counts[b];
  });
  order.resize(static_cast<size_t>(std::clamp<int64_t>(k, 0, truth.d())));
  return order;
}

absl::StatusOr<double> MseTopK(const DomainDistribution& truth,
                               const ProcessedEstimate& est, int64_t k) {
  if (absl::Status s = ValidateQuery(QuerySpec::TopK(k), truth.d()); !s.ok()) {
    return s;
  }
  double total = 0.0;
  for (uint32_t v : TopKIndices(truth, k)) {
    const double answer =
        est.clip_query_answers ? std::max(est.est[v], 0.0) : est.est[v];
    const double err = truth.freqs[v] - answer;
    total += err * err;
  }
  return total / static_cast<double>(k);
}

}  // namespace ldpfo
