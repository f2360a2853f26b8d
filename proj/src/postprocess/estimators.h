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

// Post-processing of raw frequency-oracle estimates.
//
// Every method maps an EstimateVector f~ to a ProcessedEstimate f'. They
// differ in which consistency constraints they enforce (non-negativity,
// summing to one) and in how the resulting bias is spread over the domain:
//
//   base      identity
//   base-pos  clip negatives to 0
//   post-pos  identity on the vector; query answers are clipped at 0
//   base-cut  zero everything at or below T = InvNormCdf(1 - alpha/d) * sigma
//   norm      add a common delta so the sum is 1
//   norm-mul  clip negatives, then scale by gamma so the sum is 1
//   norm-cut  zero the smallest entries until what remains sums to <= 1
//   norm-sub  Euclidean projection onto the probability simplex
//   mle-apx   constrained maximum likelihood under the Gaussian noise model
//   power     posterior mean under a fitted power-law prior
//   power-ns  norm-sub applied to the power output

#ifndef LDPFO_POSTPROCESS_ESTIMATORS_H_
#define LDPFO_POSTPROCESS_ESTIMATORS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "core/domain.h"
#include "core/method.h"
#include "oracles/frequency_oracle.h"

namespace ldpfo {

// Result of the methods that solve for a single free parameter. `zero_set`
// lists the indices whose output is exactly zero, in increasing order.
struct SolverResult {
  ProcessedEstimate est;
  std::vector<size_t> zero_set;
  double shift = 0.0;      // delta (norm-sub)
  double scale = 1.0;      // gamma (norm-mul)
  double threshold = 0.0;  // theta (norm-cut)
  double multiplier = 0.0; // common KKT multiplier on the free set (mle-apx)
  int iterations = 0;
};

struct CutConfig {
  double alpha = 2.0;
  double threshold = 0.0;

  // threshold = InvNormCdf(1 - alpha/d) * sigma, sigma from the f-free
  // variance approximation. Needs 0 < alpha < d.
  static absl::StatusOr<CutConfig> For(double alpha, size_t d,
                                       const NoiseModel& noise);
};

struct PowerPrior {
  double exponent = 0.0;
  size_t grid_size = 0;
  // Set when the fitted slope was increasing and the exponent was clamped to 0.
  bool exponent_clamped = false;
};

// Inverse of the standard normal CDF.
double InverseNormalCdf(double probability);

ProcessedEstimate Base(const EstimateVector& est);
ProcessedEstimate BasePos(const EstimateVector& est);
double PostPos(double query_answer);
ProcessedEstimate PostPosEstimate(const EstimateVector& est);
ProcessedEstimate BaseCut(const EstimateVector& est, const CutConfig& cfg);
ProcessedEstimate Norm(const EstimateVector& est);
absl::StatusOr<SolverResult> NormMul(const EstimateVector& est);
SolverResult NormCut(const EstimateVector& est);
SolverResult NormSub(const EstimateVector& est);
SolverResult NormSub(std::vector<double> values);

// Minimizes sum_v (f'_v - f~_v)^2 (p-q)^2 / [q(1-q) + f'_v (p-q)(1-p-q)]
// over the probability simplex by active-set iteration.
absl::StatusOr<SolverResult> MleApx(const EstimateVector& est,
                                    const PerturbParams& params);

// Least-squares slope of log(est) against log(rank) over the entries above
// `noise_floor`; exponent = -slope.
absl::StatusOr<PowerPrior> FitPowerPrior(const EstimateVector& est,
                                         double noise_floor,
                                         size_t grid_size);
absl::StatusOr<ProcessedEstimate> Power(const EstimateVector& est,
                                        const PowerPrior& prior,
                                        const NoiseModel& noise);
absl::StatusOr<ProcessedEstimate> PowerNs(const EstimateVector& est,
                                          const PowerPrior& prior,
                                          const NoiseModel& noise);

// Everything a method may need beyond the estimate itself.
struct MethodContext {
  PerturbParams params;
  int64_t n = 0;
  double alpha = 2.0;
  // Power grid resolution; 0 selects ceil(sqrt(n)).
  size_t grid_size = 0;
};

size_t DefaultGridSize(int64_t n);

struct MethodOutput {
  ProcessedEstimate est;
  // Populated for power and power-ns.
  std::optional<PowerPrior> prior;
};

absl::StatusOr<MethodOutput> ApplyMethod(Method method,
                                         const EstimateVector& est,
                                         const MethodContext& ctx);

}  // namespace ldpfo

#endif  // LDPFO_POSTPROCESS_ESTIMATORS_H_
