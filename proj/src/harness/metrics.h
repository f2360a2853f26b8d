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

// Error metrics over frequency queries. A query asks for the total frequency
// of a set of values; the full-domain and top-k metrics use singleton sets.

#ifndef LDPFO_HARNESS_METRICS_H_
#define LDPFO_HARNESS_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "core/domain.h"
#include "core/random.h"

namespace ldpfo {

enum class QueryKind { kFull, kSet, kFixedSets, kTopK };

// Named value sets read from `set_id,member_index` records.
struct FixedSets {
  std::vector<std::string> ids;  // in order of first appearance
  std::vector<std::vector<uint32_t>> members;

  size_t size() const { return ids.size(); }
};

absl::StatusOr<FixedSets> ParseFixedSets(absl::string_view text, size_t d);
absl::StatusOr<FixedSets> LoadFixedSets(const std::string& path, size_t d);

struct QuerySpec {
  QueryKind kind = QueryKind::kFull;
  double rho = 0.0;  // percent of the domain per random subset (kSet)
  int64_t k = 0;     // kTopK
  FixedSets sets;    // kFixedSets
  std::string sets_source;

  static QuerySpec Full();
  static QuerySpec Set(double rho);
  static QuerySpec TopK(int64_t k);
  static QuerySpec Fixed(FixedSets sets, std::string source);
};

// "mse_full", "mse_set", "mse_fixed_sets" or "mse_topk".
std::string MetricName(QueryKind kind);
// The CSV `param` column: rho, k, the set file, or empty.
std::string MetricParam(const QuerySpec& query);

absl::Status ValidateQuery(const QuerySpec& query, size_t d);

// Answer to the query "total frequency of `members`", floored at zero when
// the method clips query answers (Post-Pos).
double QueryAnswer(const ProcessedEstimate& est,
                   std::span<const uint32_t> members);

double MseFull(const DomainDistribution& truth, const ProcessedEstimate& est);

// Subset size round(rho * d / 100).
int64_t SubsetSize(double rho, size_t d);

// `samples` uniform subsets of the given size, each drawn without replacement.
std::vector<std::vector<uint32_t>> SampleSubsets(size_t d, int64_t size,
                                                 int samples, RngSeed seed);

// Mean squared error of set answers over the given subsets.
double MseSets(const DomainDistribution& truth, const ProcessedEstimate& est,
               std::span<const std::vector<uint32_t>> sets);

absl::StatusOr<double> MseSet(const DomainDistribution& truth,
                              const ProcessedEstimate& est, double rho,
                              int samples, RngSeed seed);

// Indices of the k largest true frequencies; ties go to the lower index.
std::vector<uint32_t> TopKIndices(const DomainDistribution& truth, int64_t k);

absl::StatusOr<double> MseTopK(const DomainDistribution& truth,
                               const ProcessedEstimate& est, int64_t k);

}  // namespace ldpfo

#endif  // LDPFO_HARNESS_METRICS_H_
