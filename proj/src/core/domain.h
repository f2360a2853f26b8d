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

#ifndef LDPFO_CORE_DOMAIN_H_
#define LDPFO_CORE_DOMAIN_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "core/method.h"
#include "core/random.h"

namespace ldpfo {

// A population over the index domain [0, d). Integer counts are the source of
// truth; `freqs` is counts / n. Labels are carried for reporting only.
struct DomainDistribution {
  std::vector<int64_t> counts;
  std::vector<double> freqs;
  std::vector<std::string> labels;
  int64_t n = 0;

  size_t d() const { return counts.size(); }
};

// Raw frequency-oracle output. Entries may be negative and need not sum to 1.
struct EstimateVector {
  std::vector<double> est;

  size_t d() const { return est.size(); }
};

// Output of a post-processing method together with the consistency guarantees
// that method makes.
struct ProcessedEstimate {
  std::vector<double> est;
  Method method = Method::kBase;
  bool nonneg_guaranteed = false;
  bool sums_to_one_guaranteed = false;
  // Post-Pos leaves the vector alone and clips each query answer at zero.
  bool clip_query_answers = false;

  size_t d() const { return est.size(); }
};

// Largest-remainder apportionment of `total` units over non-negative weights.
// Remainder ties go to the lower index, so non-increasing weights yield
// non-increasing counts. Weights must have a positive sum.
std::vector<int64_t> ApportionCounts(std::span<const double> weights,
                                     int64_t total);

// Builds a distribution from integer counts. Labels default to the index.
absl::StatusOr<DomainDistribution> DistributionFromCounts(
    std::vector<int64_t> counts, std::vector<std::string> labels = {});

// Materializes a population of n users from a frequency vector via
// apportionment. Negative entries are treated as zero.
absl::StatusOr<DomainDistribution> DistributionFromFrequencies(
    std::span<const double> freqs, int64_t n);

// Zipf population: weight (i+1)^-s for rank i, apportioned onto n users.
absl::StatusOr<DomainDistribution> GenerateZipf(int64_t d, int64_t n,
                                                double s);

// Reads newline-delimited `label,count` records (no header).
absl::StatusOr<DomainDistribution> LoadCounts(const std::string& path);
absl::StatusOr<DomainDistribution> ParseCounts(absl::string_view text);

absl::Status SaveCounts(const DomainDistribution& dist,
                        const std::string& path);
std::string FormatCounts(const DomainDistribution& dist);

// The population as a shuffled list of value indices (exactly counts[v]
// copies of v).
std::vector<uint32_t> SampleUsers(const DomainDistribution& dist,
                                  RngSeed seed);

}  // namespace ldpfo

#endif  // LDPFO_CORE_DOMAIN_H_
