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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Seeds and tolerances are fixed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "core/domain.h"
#include "core/method.h"
#include "core/random.h"
#include "harness/experiment.h"
#include "harness/metrics.h"
#include "oracles/frequency_oracle.h"
#include "postprocess/estimators.h"
#include "support/oracles.h"

namespace ldpfo {
namespace {

constexpr RngSeed kSeed{1};

RngSeed CriterionSeed(int criterion) { return DeriveSeed(kSeed, criterion); }

int Threads() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Timer {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

template <typename T>
T Unwrap(absl::StatusOr<T> v, const char* what) {
  if (!v.ok()) {
    std::fprintf(stderr, "%s: %s\n", what, v.status().ToString().c_str());
    std::exit(2);
  }
  return *std::move(v);
}

const MethodSummary& Summary(const ExperimentResult& r, Method m) {
  for (const MethodSummary& s : r.methods) {
    if (s.method == m) return s;
  }
  std::fprintf(stderr, "method %s missing\n", std::string(MethodName(m)).c_str());
  std::exit(2);
}

const MetricRecord& Record(const ExperimentResult& r, Method m,
                           const std::string& metric,
                           const std::string& param = "") {
  for (const MetricRecord& rec : r.records) {
    if (rec.method == m && rec.metric == metric && rec.param == param) {
      return rec;
    }
  }
  std::fprintf(stderr, "record %s/%s/%s missing\n",
               std::string(MethodName(m)).c_str(), metric.c_str(),
               param.c_str());
  std::exit(2);
}

// Shared by criteria 1 and 2.
ExperimentConfig SmallZipf(int reps, int criterion) {
  ExperimentConfig config;
  config.data = Unwrap(GenerateZipf(64, 50000, 1.5), "zipf");
  config.dataset = "zipf(64,5e4,1.5)";
  config.epsilon = 1.0;
  config.protocol = Protocol::kOlh;
  config.methods = {Method::kBase};
  config.repetitions = reps;
  config.base_seed = CriterionSeed(criterion);
  config.threads = Threads();
  return config;
}

Outcome OracleUnbiasedness() {
  Timer timer;
  const int reps = 50;
  ExperimentConfig config = SmallZipf(reps, 1);
  ExperimentResult r = Unwrap(RunBiasVariance(config), "bias-variance");
  const MethodSummary& base = Summary(r, Method::kBase);
  int within = 0;
  for (size_t v = 0; v < config.data.d(); ++v) {
    const double se = std::sqrt(base.variance[v] / reps);
    if (std::abs(base.bias[v]) <= 4.0 * se) ++within;
  }
  const double share = static_cast<double>(within) / config.data.d();
  const double secs = timer.Seconds();
  return {share >= 0.99 && secs < 60.0,
          absl::StrFormat("%d/%d values within 4 SE (need >= 99%%), %.1f s",
                          within, config.data.d(), secs)};
}

Outcome VarianceFormula() {
  Timer timer;
  ExperimentConfig config = SmallZipf(200, 2);
  ExperimentResult r = Unwrap(RunBiasVariance(config), "bias-variance");
  const MethodSummary& base = Summary(r, Method::kBase);
  const PerturbParams params = Unwrap(PerturbParams::Olh(1.0, 64), "params");
  int checked = 0, ok = 0;
  double worst = 0.0;
  for (size_t v = 0; v < config.data.d(); ++v) {
    const double f = config.data.freqs[v];
    if (f < 0.01) continue;
    const double expected = AnalyticVariance(params, config.data.n, f);
    const double rel = std::abs(base.variance[v] / expected - 1.0);
    worst = std::max(worst, rel);
    ++checked;
    if (rel <= 0.15) ++ok;
  }
  const double secs = timer.Seconds();
  return {checked > 0 && ok == checked && secs < 120.0,
          absl::StrFormat("%d/%d values with f >= 0.01 within 15%% "
                          "(worst %.3f), %.1f s",
                          ok, checked, worst, secs)};
}

Outcome NormSubIsProjection() {
  Timer timer;
  std::mt19937_64 gen(CriterionSeed(3).value);
  std::uniform_int_distribution<size_t> dim(2, 32);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::vector<double> y =
        testing::UniformVector(gen, dim(gen), -0.5, 1.0);
    const std::vector<double> got = NormSub(y).est.est;
    const std::vector<double> want = testing::DykstraSimplexProjection(y);
    for (size_t v = 0; v < y.size(); ++v) {
      worst = std::max(worst, std::abs(got[v] - want[v]));
    }
  }
  const double secs = timer.Seconds();
  return {worst <= 1e-9 && secs < 1.0,
          absl::StrFormat("max-abs difference %.2e over 100 vectors, %.3f s",
                          worst, secs)};
}

Outcome MleApxOptimal() {
  Timer timer;
  std::mt19937_64 gen(CriterionSeed(4).value);
  std::uniform_int_distribution<size_t> dim(2, 16);
  const double budgets[] = {0.5, 1.0, 2.0};
  double worst = 0.0;
  bool feasible = true;
  for (int i = 0; i < 50; ++i) {
    const size_t d = dim(gen);
    const PerturbParams params =
        Unwrap(PerturbParams::Olh(budgets[i % 3], static_cast<int64_t>(d)),
               "params");
    const std::vector<double> y = testing::UniformVector(gen, d, -0.5, 1.0);
    EstimateVector est{y};
    const std::vector<double> got = Unwrap(MleApx(est, params), "mle").est.est;
    double sum = 0.0;
    for (double x : got) {
      feasible = feasible && x >= 0.0;
      sum += x;
    }
    feasible = feasible && std::abs(sum - 1.0) <= 1e-9;
    const double mine = testing::MleObjective(got, y, params);
    const double oracle =
        testing::MleObjective(testing::MleDualOracle(y, params), y, params);
    worst = std::max(worst, (mine - oracle) / std::max(oracle, 1e-300));
  }
  const double secs = timer.Seconds();
  return {feasible && worst <= 1e-6 && secs < 30.0,
          absl::StrFormat("%s, worst relative excess %.2e over 50 instances, "
                          "%.2f s",
                          feasible ? "feasible" : "INFEASIBLE", worst, secs)};
}

// Criteria 5, 6, 8, 9 and 10 share one run.
struct DeskRun {
  ExperimentResult result;
  PerturbParams params;
  double seconds = 0.0;
};

DeskRun RunDeskScale() {
  Timer timer;
  ExperimentConfig config;
  config.data = Unwrap(GenerateZipf(1024, 1000000, 1.5), "zipf");
  config.dataset = "zipf(1024,1e6,1.5)";
  config.epsilon = 1.0;
  config.protocol = Protocol::kOlh;
  config.repetitions = 10;
  config.base_seed = CriterionSeed(5);
  config.threads = Threads();
  config.set_samples = 100;
  config.queries = {QuerySpec::Full(), QuerySpec::Set(90), QuerySpec::TopK(2),
                    QuerySpec::TopK(8), QuerySpec::TopK(32)};
  DeskRun run;
  run.result = Unwrap(RunMseExperiment(config), "desk-scale run");
  run.params = Unwrap(PerturbParams::Olh(1.0, 1024), "params");
  run.seconds = timer.Seconds();
  return run;
}

double Full(const DeskRun& run, Method m) {
  return Record(run.result, m, "mse_full").value;
}

Outcome NormSubMatchesMle(const DeskRun& run) {
  const double a = Full(run, Method::kNormSub);
  const double b = Full(run, Method::kMleApx);
  const double rel = std::abs(a - b) / std::min(a, b);
  return {rel <= 0.05,
          absl::StrFormat("norm-sub %.4e, mle-apx %.4e, relative gap %.4f",
                          a, b, rel)};
}

Outcome DeskOrdering(const DeskRun& run) {
  const double base = Full(run, Method::kBase);
  const double ns = Full(run, Method::kNormSub);
  const double pns = Full(run, Method::kPowerNs);
  double best = pns;
  Method best_method = Method::kPowerNs;
  for (Method m : kAllMethods) {
    if (Full(run, m) < best) {
      best = Full(run, m);
      best_method = m;
    }
  }
  const bool pass =
      ns <= base / 5.0 && pns <= 1.1 * best && run.seconds < 300.0;
  return {pass,
          absl::StrFormat("base/norm-sub = %.1f (need >= 5), power-ns/min = "
                          "%.3f (min %s, need <= 1.1), %.1f s",
                          base / ns, pns / best,
                          std::string(MethodName(best_method)), run.seconds)};
}

Outcome BiasChecks() {
  Timer timer;
  const int reps = 500;
  std::vector<int64_t> counts =
      Unwrap(GenerateZipf(56, 50000, 1.5), "zipf").counts;
  counts.resize(64, 0);
  constexpr size_t kZero = 56;
  ExperimentConfig config;
  config.data = Unwrap(DistributionFromCounts(counts), "counts");
  config.dataset = "zipf(56,5e4,1.5)+8 zeros";
  config.epsilon = 1.0;
  config.protocol = Protocol::kOlh;
  config.methods = {Method::kNorm, Method::kNormSub, Method::kBasePos};
  config.repetitions = reps;
  config.base_seed = CriterionSeed(7);
  config.threads = Threads();
  ExperimentResult r = Unwrap(RunBiasVariance(config), "bias-variance");

  const MethodSummary& norm = Summary(r, Method::kNorm);
  int norm_ok = 0;
  for (size_t v = 0; v < config.data.d(); ++v) {
    const double se = std::sqrt(norm.variance[v] / reps);
    if (std::abs(norm.bias[v]) <= 4.0 * se) ++norm_ok;
  }
  const bool norm_unbiased = norm_ok == static_cast<int>(config.data.d());

  // Both outputs sum to 1 up to rounding, so mean and SE are ~1e-16; the
  // absolute floor keeps rounding noise from counting as bias.
  auto sum_ok = [&](Method m, double* mean) {
    const MetricRecord& rec = Record(r, m, "bias_sum");
    const double se = rec.std / std::sqrt(static_cast<double>(reps));
    *mean = rec.value;
    return std::abs(rec.value) <= 4.0 * se + 1e-12;
  };
  double sum_norm = 0.0, sum_ns = 0.0;
  const bool sums_unbiased = sum_ok(Method::kNorm, &sum_norm) &
                      sum_ok(Method::kNormSub, &sum_ns);

  auto zero_z = [&](Method m) {
    const MethodSummary& s = Summary(r, m);
    return s.bias[kZero] / std::sqrt(s.variance[kZero] / reps);
  };
  const double z_basepos = zero_z(Method::kBasePos);
  const double z_normsub = zero_z(Method::kNormSub);
  const bool basepos_positive = z_basepos > 4.0;
  const bool normsub_positive = z_normsub > 4.0;
  const double secs = timer.Seconds();
  return {basepos_positive && sums_unbiased && norm_unbiased && normsub_positive,
          absl::StrFormat("norm per-value %d/%d within 4 SE; sum-bias "
                          "mean %.1e (norm), %.1e (norm-sub); zero "
                          "value bias %.1f SE (base-pos), %.1f SE (norm-sub); "
                          "%.1f s",
                          norm_ok, config.data.d(), sum_norm, sum_ns, z_basepos,
                          z_normsub, secs)};
}

Outcome SetSeparation(const DeskRun& run) {
  const double pns = Record(run.result, Method::kPowerNs, "mse_set", "90").value;
  const double bp = Record(run.result, Method::kBasePos, "mse_set", "90").value;
  const double ratio = pns / bp;
  return {ratio <= std::pow(10.0, -1.5),
          absl::StrFormat("power-ns/base-pos = %.3e (need <= %.3e)", ratio,
                          std::pow(10.0, -1.5))};
}

Outcome TopK(const DeskRun& run) {
  bool pass = true;
  std::string detail;
  for (int k : {2, 8, 32}) {
    const std::string key = absl::StrCat(k);
    const double norm = Record(run.result, Method::kNorm, "mse_topk", key).value;
    const double ns =
        Record(run.result, Method::kNormSub, "mse_topk", key).value;
    const double base = Record(run.result, Method::kBase, "mse_topk", key).value;
    pass = pass && norm <= ns && norm <= 1.2 * base;
    absl::StrAppendFormat(&detail, "%sk=%d norm/norm-sub %.3f norm/base %.3f",
                          detail.empty() ? "" : "; ", k, norm / ns,
                          norm / base);
  }
  return {pass, detail};
}

Outcome EquivalentUsers(const DeskRun& run) {
  const double n = static_cast<double>(run.result.config.data.n);
  const double base =
      Unwrap(EquivalentN(run.params, Full(run, Method::kBase)), "n'") / n;
  const double pns =
      Unwrap(EquivalentN(run.params, Full(run, Method::kPowerNs)), "n'") / n;
  return {base >= 0.8 && base <= 1.2 && pns >= 6.0 && pns <= 14.0,
          absl::StrFormat("n'/n base %.3f (need [0.8, 1.2]), power-ns %.2f "
                          "(need [6, 14])",
                          base, pns)};
}

Outcome PropertySuite() {
  Timer timer;
  const std::string cmd =
      absl::StrCat("\"", LDPFO_PROPERTIES_TEST_PATH, "\" > /dev/null 2>&1");
  const int rc = std::system(cmd.c_str());
  const double secs = timer.Seconds();
  return {rc == 0 && secs < 30.0,
          absl::StrFormat("properties_test exit %d, %.2f s", rc, secs)};
}

int Main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const Outcome& o) {
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str());
    std::fflush(stdout);
  };
  report(1, "oracle unbiasedness", OracleUnbiasedness());
  report(2, "variance formula", VarianceFormula());
  report(3, "norm-sub equals simplex projection", NormSubIsProjection());
  report(4, "mle-apx optimality", MleApxOptimal());
  const DeskRun desk = RunDeskScale();
  report(5, "norm-sub close to mle-apx", NormSubMatchesMle(desk));
  report(6, "desk-scale ordering", DeskOrdering(desk));
  report(7, "bias checks", BiasChecks());
  report(8, "set-query separation", SetSeparation(desk));
  report(9, "top-k", TopK(desk));
  report(10, "equivalent users", EquivalentUsers(desk));
  report(11, "standalone property suite", PropertySuite());
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace ldpfo

int main() { return ldpfo::Main(); }
