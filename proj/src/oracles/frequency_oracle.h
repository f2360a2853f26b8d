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

// Generalized randomized response (GRR) and optimized local hashing (OLH).
//
// Both protocols are described by a pair (p, q): a report supports the
// reporting user's own value with probability p and any other value with
// probability q. For OLH the "other value" probability is 1/g, which is what
// `PerturbParams::q` holds. Everything downstream (estimation, variance,
// post-processing) only needs (p, q).

#ifndef LDPFO_ORACLES_FREQUENCY_ORACLE_H_
#define LDPFO_ORACLES_FREQUENCY_ORACLE_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "core/domain.h"
#include "core/random.h"

namespace ldpfo {

enum class Protocol { kGrr, kOlh };

absl::string_view ProtocolName(Protocol protocol);
absl::StatusOr<Protocol> ParseProtocol(absl::string_view name);

// Upper bound on the OLH hash range. Reached only for very large epsilon.
inline constexpr int64_t kMaxHashRange = int64_t{1} << 32;

struct PerturbParams {
  Protocol protocol = Protocol::kOlh;
  double epsilon = 0.0;
  int64_t d = 0;
  // Output range of the randomizer: d for GRR, the hash range for OLH.
  int64_t g = 0;
  double p = 0.0;
  double q = 0.0;

  // p = e^eps / (e^eps + d - 1), q = 1 / (e^eps + d - 1).
  static absl::StatusOr<PerturbParams> Grr(double epsilon, int64_t d);
  // g = round(e^eps + 1) (at least 2), p = e^eps / (e^eps + g - 1), q = 1/g.
  static absl::StatusOr<PerturbParams> Olh(double epsilon, int64_t d);
  static absl::StatusOr<PerturbParams> Make(Protocol protocol, double epsilon,
                                            int64_t d);
};

struct OlhReport {
  uint64_t key = 0;  // selects the hash function H_key
  uint32_t y = 0;    // perturbed hash value in [0, g)
};

struct SupportCounts {
  std::vector<int64_t> counts;
  int64_t n = 0;

  size_t d() const { return counts.size(); }
};

// Keyed hash of a value index into [0, g). For a uniformly random key the
// output for a fixed value is uniform, and outputs for distinct values are
// (statistically) independent.
inline uint32_t HashToRange(uint64_t key, uint64_t value, uint64_t g) {
  const uint64_t h = Mix64(key ^ ((value + 1) * 0x9e3779b97f4a7c15ULL));
  return static_cast<uint32_t>(ReduceToRange(h, g));
}

absl::StatusOr<uint32_t> GrrPerturb(uint32_t v, const PerturbParams& params,
                                    RngSeed seed);
absl::StatusOr<OlhReport> OlhPerturb(uint32_t v, const PerturbParams& params,
                                     RngSeed seed);

absl::StatusOr<SupportCounts> GrrAggregate(std::span<const uint32_t> reports,
                                           int64_t d);
// counts[v] = |{i : H_{key_i}(v) == y_i}|.
SupportCounts OlhAggregate(std::span<const OlhReport> reports, int64_t d,
                           int64_t g);

// Perturbs every user with seed DeriveSeed(seed, i) and aggregates. Equivalent
// to calling the per-user perturbation followed by aggregation.
absl::StatusOr<SupportCounts> SimulateSupportCounts(
    std::span<const uint32_t> users, const PerturbParams& params,
    RngSeed seed);

// est[v] = (c_v / n - q) / (p - q).
absl::StatusOr<EstimateVector> Estimate(const SupportCounts& counts,
                                        const PerturbParams& params);

// Variance of a single estimate. With f_v:
//   [q(1-q) + f_v (p-q)(1-p-q)] / (n (p-q)^2),
// without it the f_v term is dropped.
double AnalyticVariance(const PerturbParams& params, int64_t n,
                        std::optional<double> f_v = std::nullopt);

struct NoiseModel {
  PerturbParams params;
  int64_t n = 0;
  double sigma_sq_approx = 0.0;

  static NoiseModel For(const PerturbParams& params, int64_t n);

  double sigma() const;
  double VarianceAt(double f_v) const;
};

// Debug export of raw reports as `key,y` lines.
void WriteOlhReportsCsv(std::span<const OlhReport> reports, std::ostream& out);

}  // namespace ldpfo

#endif  // LDPFO_ORACLES_FREQUENCY_ORACLE_H_
