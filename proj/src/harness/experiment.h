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

// Monte-Carlo experiments. A repetition samples the population, runs the
// frequency oracle once and applies every configured method to the same raw
// estimate. Repetition r draws all of its randomness from
// DeriveSeed(base_seed, r), so results do not depend on scheduling.

#ifndef LDPFO_HARNESS_EXPERIMENT_H_
#define LDPFO_HARNESS_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "core/domain.h"
#include "core/method.h"
#include "core/random.h"
#include "harness/metrics.h"
#include "oracles/frequency_oracle.h"
#include "postprocess/estimators.h"

namespace ldpfo {

inline constexpr int kDefaultRepetitions = 30;
inline constexpr int kDefaultBiasVarianceRepetitions = 500;
inline constexpr int kDefaultSetSamples = 100;

// Called after each finished repetition with (done, total).
using ProgressFn = std::function<void(int, int)>;

struct ExperimentConfig {
  DomainDistribution data;
  std::string dataset;  // description echoed into results
  double epsilon = 1.0;
  Protocol protocol = Protocol::kOlh;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  int repetitions = kDefaultRepetitions;
  RngSeed base_seed{0};
  double alpha = 2.0;
  size_t grid_size = 0;  // 0 selects ceil(sqrt(n))
  int threads = 1;
  int set_samples = kDefaultSetSamples;
  std::vector<QuerySpec> queries{QuerySpec::Full()};
  ProgressFn progress;

  absl::Status Validate() const;
  MethodContext Context(const PerturbParams& params) const;
};

struct RepetitionOutput {
  EstimateVector raw;
  std::vector<MethodOutput> outputs;  // parallel to config.methods
  std::vector<double> seconds;        // post-processing time per method
};

absl::StatusOr<RepetitionOutput> RunOnce(const ExperimentConfig& config,
                                         int rep_index);

struct MetricRecord {
  Method method = Method::kBase;
  std::string metric;
  std::string param;
  double value = 0.0;
  double std = 0.0;
};

struct MethodSummary {
  Method method = Method::kBase;
  double wall_time = 0.0;  // seconds spent in this method, all repetitions
  // Frequency units; filled by the bias/variance experiment.
  std::vector<double> bias;
  std::vector<double> variance;
};

struct ExperimentResult {
  std::string experiment;
  ExperimentConfig config;  // echo; `data` is kept, `progress` is dropped
  std::vector<MethodSummary> methods;
  std::vector<MetricRecord> records;
  std::map<std::string, std::string> metadata;
  std::optional<Method> selected;
};

// Mean (and standard deviation across repetitions) of each configured query
// metric for each method.
absl::StatusOr<ExperimentResult> RunMseExperiment(
    const ExperimentConfig& config);

// Per-value empirical bias and variance. CSV rows are in count units (bias
// times n, variance times n^2); the sum of biases is reported in frequency
// units with its standard error.
absl::StatusOr<ExperimentResult> RunBiasVariance(
    const ExperimentConfig& config);

// q(1-q)/(p-q)^2 + (1/d)(1-p-q)/(p-q): n times the domain-averaged variance
// of the raw estimator.
double EquivalentNumerator(const PerturbParams& params);

// n' = EquivalentNumerator / MSE. Fails on zero MSE.
absl::StatusOr<double> EquivalentN(const PerturbParams& params, double mse);

absl::StatusOr<ExperimentResult> RunEquivalentN(const ExperimentConfig& config);

// Picks the method with the lowest mean error on the first configured query
// against a synthetic population fitted from `est` with `consistency`
// (norm-sub or power-ns). Ties go to the earlier method in kAllMethods order.
absl::StatusOr<ExperimentResult> SelectMethodSynthetic(
    const EstimateVector& est, const ExperimentConfig& config,
    Method consistency);

// One oracle run on the real data followed by SelectMethodSynthetic. The real
// run uses repetition index 0; the synthetic runs use a derived seed.
absl::StatusOr<ExperimentResult> RunSelectMethod(const ExperimentConfig& config,
                                                 Method consistency);

}  // namespace ldpfo

#endif  // LDPFO_HARNESS_EXPERIMENT_H_
