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

#include "oracles/frequency_oracle.h"

#include <cmath>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"

namespace ldpfo {
namespace {

absl::Status CheckEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || std::isnan(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  return absl::OkStatus();
}

// Randomized response over [0, range): keep `v` with probability `keep`,
// otherwise report one of the other range - 1 values uniformly.
uint64_t RandomizeIndex(uint64_t v, uint64_t range, double keep,
                        SplitMix64& gen) {
  if (UniformDouble(gen) < keep) return v;
  const uint64_t other = UniformIndex(gen, range - 1);
  return other < v ? other : other + 1;
}

OlhReport OlhPerturbUnchecked(uint32_t v, const PerturbParams& params,
                              RngSeed seed) {
  SplitMix64 gen(seed);
  OlhReport report;
  report.key = gen();
  const uint64_t g = static_cast<uint64_t>(params.g);
  const uint64_t hashed = HashToRange(report.key, v, g);
  report.y = static_cast<uint32_t>(RandomizeIndex(hashed, g, params.p, gen));
  return report;
}

absl::Status CheckValue(uint32_t v, const PerturbParams& params) {
  if (static_cast<int64_t>(v) >= params.d) {
    return absl::OutOfRangeError(
        absl::StrCat("value ", v, " outside domain of size ", params.d));
  }
  return absl::OkStatus();
}

}  // namespace

absl::string_view ProtocolName(Protocol protocol) {
  return protocol == Protocol::kGrr ? "grr" : "olh";
}

absl::StatusOr<Protocol> ParseProtocol(absl::string_view name) {
  const std::string key = absl::AsciiStrToLower(name);
  if (key == "grr") return Protocol::kGrr;
  if (key == "olh") return Protocol::kOlh;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown oracle '", name, "' (expected grr or olh)"));
}

absl::StatusOr<PerturbParams> PerturbParams::Grr(double epsilon, int64_t d) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (d < 2) return absl::InvalidArgumentError("GRR needs d >= 2");
  PerturbParams params;
  params.protocol = Protocol::kGrr;
  params.epsilon = epsilon;
  params.d = d;
  params.g = d;
  // Written in terms of e^-eps so that large budgets do not overflow.
  const double inv = std::exp(-epsilon);
  const double denom = 1.0 + static_cast<double>(d - 1) * inv;
  params.p = 1.0 / denom;
  params.q = inv / denom;
  return params;
}

absl::StatusOr<PerturbParams> PerturbParams::Olh(double epsilon, int64_t d) {
  if (absl::Status s = CheckEpsilon(epsilon); !s.ok()) return s;
  if (d < 1) return absl::InvalidArgumentError("OLH needs d >= 1");
  PerturbParams params;
  params.protocol = Protocol::kOlh;
  params.epsilon = epsilon;
  params.d = d;
  const double ideal = std::exp(epsilon) + 1.0;
  params.g = ideal >= static_cast<double>(kMaxHashRange)
                 ? kMaxHashRange
                 : std::max<int64_t>(2, std::llround(ideal));
  const double inv = std::exp(-epsilon);
  params.p = 1.0 / (1.0 + static_cast<double>(params.g - 1) * inv);
  params.q = 1.0 / static_cast<double>(params.g);
  return params;
}

absl::StatusOr<PerturbParams> PerturbParams::Make(Protocol protocol,
                                                  double epsilon, int64_t d) {
  return protocol == Protocol::kGrr ? Grr(epsilon, d) : Olh(epsilon, d);
}

absl::StatusOr<uint32_t> GrrPerturb(uint32_t v, const PerturbParams& params,
                                    RngSeed seed) {
  if (params.protocol != Protocol::kGrr) {
    return absl::InvalidArgumentError("GrrPerturb needs GRR parameters");
  }
  if (absl::Status s = CheckValue(v, params); !s.ok()) return s;
  SplitMix64 gen(seed);
  return static_cast<uint32_t>(
      RandomizeIndex(v, static_cast<uint64_t>(params.d), params.p, gen));
}

absl::StatusOr<OlhReport> OlhPerturb(uint32_t v, const PerturbParams& params,
                                     RngSeed seed) {
  if (params.protocol != Protocol::kOlh) {
    return absl::InvalidArgumentError("OlhPerturb needs OLH parameters");
  }
  if (absl::Status s = CheckValue(v, params); !s.ok()) return s;
  return OlhPerturbUnchecked(v, params, seed);
}

absl::StatusOr<SupportCounts> GrrAggregate(std::span<const uint32_t> reports,
                                           int64_t d) {
  SupportCounts counts;
  counts.counts.assign(static_cast<size_t>(d), 0);
  counts.n = static_cast<int64_t>(reports.size());
  for (uint32_t y : reports) {
    if (static_cast<int64_t>(y) >= d) {
      return absl::OutOfRangeError(
          absl::StrCat("GRR report ", y, " outside domain of size ", d));
    }
    ++counts.counts[y];
  }
  return counts;
}

SupportCounts OlhAggregate(std::span<const OlhReport> reports, int64_t d,
                           int64_t g) {
  SupportCounts counts;
  counts.counts.assign(static_cast<size_t>(d), 0);
  counts.n = static_cast<int64_t>(reports.size());
  const uint64_t range = static_cast<uint64_t>(g);
  int64_t* out = counts.counts.data();
  for (const OlhReport& r : reports) {
    for (int64_t v = 0; v < d; ++v) {
      out[v] += HashToRange(r.key, static_cast<uint64_t>(v), range) == r.y;
    }
  }
  return counts;
}

absl::StatusOr<SupportCounts> SimulateSupportCounts(
    std::span<const uint32_t> users, const PerturbParams& params,
    RngSeed seed) {
  for (uint32_t v : users) {
    if (absl::Status s = CheckValue(v, params); !s.ok()) return s;
  }
  if (params.protocol == Protocol::kGrr) {
    SupportCounts counts;
    counts.counts.assign(static_cast<size_t>(params.d), 0);
    counts.n = static_cast<int64_t>(users.size());
    const uint64_t d = static_cast<uint64_t>(params.d);
    for (size_t i = 0; i < users.size(); ++i) {
      SplitMix64 gen(DeriveSeed(seed, i));
      ++counts.counts[RandomizeIndex(users[i], d, params.p, gen)];
    }
    return counts;
  }
  std::vector<OlhReport> reports(users.size());
  for (size_t i = 0; i < users.size(); ++i) {
    reports[i] = OlhPerturbUnchecked(users[i], params, DeriveSeed(seed, i));
  }
  return OlhAggregate(reports, params.d, params.g);
}

absl::StatusOr<EstimateVector> Estimate(const SupportCounts& counts,
                                        const PerturbParams& params) {
  if (counts.n < 1) {
    return absl::InvalidArgumentError("estimate needs at least one report");
  }
  const double scale = params.p - params.q;
  if (!(scale != 0.0)) {
    return absl::FailedPreconditionError(
        "degenerate privacy parameters: p == q");
  }
  const double n = static_cast<double>(counts.n);
  EstimateVector est;
  est.est.resize(counts.d());
  for (size_t v = 0; v < counts.d(); ++v) {
    est.est[v] = (static_cast<double>(counts.counts[v]) / n - params.q) / scale;
  }
  return est;
}

double AnalyticVariance(const PerturbParams& params, int64_t n,
                        std::optional<double> f_v) {
  const double p = params.p;
  const double q = params.q;
  double numerator = q * (1.0 - q);
  if (f_v.has_value()) numerator += *f_v * (p - q) * (1.0 - p - q);
  return numerator / (static_cast<double>(n) * (p - q) * (p - q));
}

NoiseModel NoiseModel::For(const PerturbParams& params, int64_t n) {
  NoiseModel model;
  model.params = params;
  model.n = n;
  model.sigma_sq_approx = AnalyticVariance(params, n);
  return model;
}

double NoiseModel::sigma() const { return std::sqrt(sigma_sq_approx); }

double NoiseModel::VarianceAt(double f_v) const {
  return AnalyticVariance(params, n, f_v);
}

void WriteOlhReportsCsv(std::span<const OlhReport> reports,
                        std::ostream& out) {
  for (const OlhReport& r : reports) out << r.key << ',' << r.y << '\n';
}

}  // namespace ldpfo
