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

#include "core/domain.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace ldpfo {

std::vector<int64_t> ApportionCounts(std::span<const double> weights,
                                     int64_t total) {
  const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int64_t> counts(weights.size(), 0);
  std::vector<double> remainders(weights.size(), 0.0);
  int64_t assigned = 0;
  for (size_t i = 0; i < weights.size(); ++i) {
    const double quota = static_cast<double>(total) * weights[i] / weight_sum;
    counts[i] = static_cast<int64_t>(std::floor(quota));
    remainders[i] = quota - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return remainders[a] > remainders[b];
  });
  for (size_t i = 0; assigned < total; i = (i + 1) % order.size()) {
    ++counts[order[i]];
    ++assigned;
  }
  // Only reachable when rounding pushes a quota just past an integer.
  for (size_t i = order.size(); assigned > total;) {
    i = (i == 0 ? order.size() : i) - 1;
    if (counts[order[i]] > 0) {
      --counts[order[i]];
      --assigned;
    }
  }
  return counts;
}

absl::StatusOr<DomainDistribution> DistributionFromCounts(
    std::vector<int64_t> counts, std::vector<std::string> labels) {
  if (counts.empty()) {
    return absl::InvalidArgumentError("distribution has an empty domain");
  }
  if (!labels.empty() && labels.size() != counts.size()) {
    return absl::InvalidArgumentError("label count does not match domain size");
  }
  int64_t n = 0;
  for (int64_t c : counts) {
    if (c < 0) return absl::InvalidArgumentError("negative count");
    n += c;
  }
  if (n < 1) {
    return absl::InvalidArgumentError("all counts are zero");
  }
  DomainDistribution dist;
  dist.n = n;
  dist.freqs.resize(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) {
    dist.freqs[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  if (labels.empty()) {
    labels.reserve(counts.size());
    for (size_t i = 0; i < counts.size(); ++i) labels.push_back(absl::StrCat(i));
  }
  dist.counts = std::move(counts);
  dist.labels = std::move(labels);
  return dist;
}

absl::StatusOr<DomainDistribution> DistributionFromFrequencies(
    std::span<const double> freqs, int64_t n) {
  if (n < 1) return absl::InvalidArgumentError("n must be at least 1");
  std::vector<double> weights(freqs.begin(), freqs.end());
  double total = 0.0;
  for (double& w : weights) {
    if (!std::isfinite(w)) {
      return absl::InvalidArgumentError("non-finite frequency");
    }
    w = std::max(w, 0.0);
    total += w;
  }
  if (!(total > 0.0)) {
    return absl::InvalidArgumentError("frequencies have no positive mass");
  }
  return DistributionFromCounts(ApportionCounts(weights, n));
}

absl::StatusOr<DomainDistribution> GenerateZipf(int64_t d, int64_t n,
                                                double s) {
  if (d < 2) return absl::InvalidArgumentError("zipf: d must be at least 2");
  if (n < 1) return absl::InvalidArgumentError("zipf: n must be at least 1");
  if (!(s > 0.0) || !std::isfinite(s)) {
    return absl::InvalidArgumentError("zipf: s must be positive");
  }
  std::vector<double> weights(static_cast<size_t>(d));
  for (int64_t i = 0; i < d; ++i) {
    weights[i] = std::pow(static_cast<double>(i + 1), -s);
  }
  return DistributionFromCounts(ApportionCounts(weights, n));
}

absl::StatusOr<DomainDistribution> ParseCounts(absl::string_view text) {
  std::vector<int64_t> counts;
  std::vector<std::string> labels;
  std::unordered_set<std::string> seen;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    absl::ConsumeSuffix(&line, "\r");
    if (line.empty()) continue;
    const size_t comma = line.rfind(',');
    if (comma == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": expected 'label,count'"));
    }
    std::string label(line.substr(0, comma));
    int64_t count = 0;
    if (!absl::SimpleAtoi(line.substr(comma + 1), &count) || count < 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": count is not a non-negative integer"));
    }
    if (!seen.insert(label).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": duplicate label '", label, "'"));
    }
    counts.push_back(count);
    labels.push_back(std::move(label));
  }
  if (counts.empty()) {
    return absl::InvalidArgumentError("dataset has no records");
  }
  if (std::all_of(counts.begin(), counts.end(),
                  [](int64_t c) { return c == 0; })) {
    return absl::InvalidArgumentError("dataset counts are all zero");
  }
  return DistributionFromCounts(std::move(counts), std::move(labels));
}

absl::StatusOr<DomainDistribution> LoadCounts(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open dataset '", path, "'"));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<DomainDistribution> dist = ParseCounts(buffer.str());
  if (!dist.ok()) {
    return absl::Status(dist.status().code(),
                        absl::StrCat(path, ": ", dist.status().message()));
  }
  return dist;
}

std::string FormatCounts(const DomainDistribution& dist) {
  std::string out;
  for (size_t i = 0; i < dist.d(); ++i) {
    absl::StrAppend(&out, dist.labels[i], ",", dist.counts[i], "\n");
  }
  return out;
}

absl::Status SaveCounts(const DomainDistribution& dist,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write '", path, "'"));
  }
  out << FormatCounts(dist);
  return out ? absl::OkStatus()
             : absl::DataLossError(absl::StrCat("write to '", path, "' failed"));
}

std::vector<uint32_t> SampleUsers(const DomainDistribution& dist,
                                  RngSeed seed) {
  std::vector<uint32_t> users;
  users.reserve(static_cast<size_t>(dist.n));
  for (size_t v = 0; v < dist.d(); ++v) {
    users.insert(users.end(), static_cast<size_t>(dist.counts[v]),
                 static_cast<uint32_t>(v));
  }
  SplitMix64 gen(seed);
  // Fisher-Yates with our own range reduction so the order does not depend
  // on the standard library's distribution implementation.
  for (size_t i = users.size(); i > 1; --i) {
    std::swap(users[i - 1], users[UniformIndex(gen, i)]);
  }
  return users;
}

}  // namespace ldpfo
