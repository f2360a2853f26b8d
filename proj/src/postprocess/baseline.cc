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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "absl/strings/str_cat.h"
#include "postprocess/estimators.h"

namespace ldpfo {
namespace {

ProcessedEstimate Wrap(std::vector<double> values, Method method, bool nonneg,
                       bool sums_to_one) {
  ProcessedEstimate out;
  out.est = std::move(values);
  out.method = method;
  out.nonneg_guaranteed = nonneg;
  out.sums_to_one_guaranteed = sums_to_one;
  return out;
}

std::vector<size_t> ZeroSet(const std::vector<double>& values) {
  std::vector<size_t> zeros;
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0) zeros.push_back(i);
  }
  return zeros;
}

double PositiveMass(const std::vector<double>& values) {
  double total = 0.0;
  for (double x : values) total += std::max(x, 0.0);
  return total;
}

}  // namespace

double InverseNormalCdf(double probability) {
  return boost::math::quantile(boost::math::normal_distribution<double>(),
                               probability);
}

absl::StatusOr<CutConfig> CutConfig::For(double alpha, size_t d,
                                         const NoiseModel& noise) {
  if (!(alpha > 0.0) || !(alpha < static_cast<double>(d))) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in (0, d), got ", alpha));
  }
  CutConfig cfg;
  cfg.alpha = alpha;
  cfg.threshold =
      InverseNormalCdf(1.0 - alpha / static_cast<double>(d)) * noise.sigma();
  return cfg;
}

ProcessedEstimate Base(const EstimateVector& est) {
  return Wrap(est.est, Method::kBase, false, false);
}

ProcessedEstimate BasePos(const EstimateVector& est) {
  std::vector<double> out = est.est;
  for (double& x : out) x = std::max(x, 0.0);
  return Wrap(std::move(out), Method::kBasePos, true, false);
}

double PostPos(double query_answer) { return std::max(query_answer, 0.0); }

ProcessedEstimate PostPosEstimate(const EstimateVector& est) {
  ProcessedEstimate out = Wrap(est.est, Method::kPostPos, false, false);
  out.clip_query_answers = true;
  return out;
}

ProcessedEstimate BaseCut(const EstimateVector& est, const CutConfig& cfg) {
  std::vector<double> out = est.est;
  for (double& x : out) {
    if (!(x > cfg.threshold)) x = 0.0;
  }
  return Wrap(std::move(out), Method::kBaseCut, true, false);
}

ProcessedEstimate Norm(const EstimateVector& est) {
  const double sum = std::accumulate(est.est.begin(), est.est.end(), 0.0);
  const double delta = (1.0 - sum) / static_cast<double>(est.d());
  std::vector<double> out = est.est;
  for (double& x : out) x += delta;
  return Wrap(std::move(out), Method::kNorm, false, true);
}

absl::StatusOr<SolverResult> NormMul(const EstimateVector& est) {
  const double mass = PositiveMass(est.est);
  if (!(mass > 0.0)) {
    return absl::InvalidArgumentError(
        "norm-mul needs at least one positive estimate");
  }
  // Clipping commutes with a positive scale, so gamma has a closed form.
  SolverResult result;
  result.scale = 1.0 / mass;
  std::vector<double> out = est.est;
  for (double& x : out) x = std::max(result.scale * x, 0.0);
  result.zero_set = ZeroSet(out);
  result.iterations = 1;
  result.est = Wrap(std::move(out), Method::kNormMul, true, true);
  return result;
}

// Consistent inputs can sum to a few ulps above 1.
constexpr double kCutSlack = 1e-12;

SolverResult NormCut(const EstimateVector& est) {
  SolverResult result;
  result.iterations = 1;
  std::vector<double> out = est.est;
  if (PositiveMass(out) <= 1.0 + kCutSlack) {
    for (double& x : out) x = std::max(x, 0.0);
    result.threshold = 0.0;
  } else {
    // Keep the largest entries, whole tie groups at a time, while their sum
    // stays within 1. theta is the smallest kept value.
    std::vector<double> sorted = out;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double kept_sum = 0.0;
    double theta = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < sorted.size();) {
      size_t j = i;
      double group_sum = 0.0;
      while (j < sorted.size() && sorted[j] == sorted[i]) group_sum += sorted[j++];
      if (kept_sum + group_sum > 1.0 + kCutSlack) break;
      kept_sum += group_sum;
      theta = sorted[i];
      i = j;
    }
    for (double& x : out) {
      if (!(x >= theta)) x = 0.0;
    }
    result.threshold = theta;
  }
  result.zero_set = ZeroSet(out);
  result.est = Wrap(std::move(out), Method::kNormCut, true, false);
  return result;
}

}  // namespace ldpfo
