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

#include "harness/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>
#include <unordered_set>

#include "absl/strings/str_cat.h"

namespace ldpfo {
namespace {

// Streams of a repetition seed.
constexpr uint64_t kUserStream = 0;
constexpr uint64_t kOracleStream = 1;
constexpr uint64_t kSubsetStream = 2;
// Child of the base seed used for synthetic populations in method selection.
constexpr uint64_t kSyntheticStream = 0x73796e746865ULL;

// Welford accumulator.
class RunningStat {
 public:
  void Add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }
  int64_t count() const { return count_; }
  double mean() const { return mean_; }
  // Sample variance; 0 with fewer than two observations.
  double variance() const {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  double stddev() const { return std::sqrt(variance()); }

 private:
  int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

using Visitor =
    std::function<absl::Status(int rep, const RepetitionOutput& output)>;

// Runs all repetitions, `threads` at a time, and hands them to `visit` in
// repetition order.
absl::Status ForEachRepetition(const ExperimentConfig& config,
                               const Visitor& visit) {
  const int total = config.repetitions;
  const int threads = std::max(1, std::min(config.threads, total));
  const int batch = threads * 2;
  std::vector<std::optional<absl::StatusOr<RepetitionOutput>>> slots;
  for (int start = 0; start < total; start += batch) {
    const int end = std::min(total, start + batch);
    slots.assign(static_cast<size_t>(end - start), std::nullopt);
    if (threads == 1) {
      for (int r = start; r < end; ++r) slots[r - start] = RunOnce(config, r);
    } else {
      std::atomic<int> next{start};
      std::vector<std::thread> workers;
      for (int t = 0; t < threads; ++t) {
        workers.emplace_back([&] {
          for (int r = next++; r < end; r = next++) {
            slots[r - start] = RunOnce(config, r);
          }
        });
      }
      for (auto& w : workers) w.join();
    }
    for (int r = start; r < end; ++r) {
      auto& slot = *slots[r - start];
      if (!slot.ok()) return slot.status();
      if (absl::Status s = visit(r, *slot); !s.ok()) return s;
      if (config.progress) config.progress(r + 1, total);
    }
  }
  return absl::OkStatus();
}

// Query sets for one repetition. Random subsets are drawn once per
// repetition and shared by every method.
std::vector<std::vector<uint32_t>> QuerySets(const ExperimentConfig& config,
                                             const QuerySpec& query, int rep,
                                             size_t query_index) {
  switch (query.kind) {
    case QueryKind::kSet: {
      const RngSeed seed = DeriveSeed(
          DeriveSeed(DeriveSeed(config.base_seed, static_cast<uint64_t>(rep)),
                     kSubsetStream),
          query_index);
      return SampleSubsets(config.data.d(),
                           SubsetSize(query.rho, config.data.d()),
                           config.set_samples, seed);
    }
    case QueryKind::kFixedSets:
      return query.sets.members;
    case QueryKind::kTopK:
    case QueryKind::kFull:
      break;
  }
  return {};
}

double Evaluate(const ExperimentConfig& config, const QuerySpec& query,
                const std::vector<std::vector<uint32_t>>& sets,
                const ProcessedEstimate& est) {
  switch (query.kind) {
    case QueryKind::kFull:
      return MseFull(config.data, est);
    case QueryKind::kTopK:
      return *MseTopK(config.data, est, query.k);
    case QueryKind::kSet:
    case QueryKind::kFixedSets:
      return MseSets(config.data, est, sets);
  }
  return 0.0;
}

std::vector<MethodSummary> EmptySummaries(const ExperimentConfig& config) {
  std::vector<MethodSummary> out;
  for (Method m : config.methods) out.push_back(MethodSummary{m});
  return out;
}

// Run-level facts shared by all experiments.
void FillMetadata(const ExperimentConfig& config, const PerturbParams& params,
                  ExperimentResult& result) {
  auto& md = result.metadata;
  md["protocol"] = std::string(ProtocolName(params.protocol));
  md["epsilon"] = absl::StrCat(params.epsilon);
  md["d"] = absl::StrCat(params.d);
  md["n"] = absl::StrCat(config.data.n);
  md["g"] = absl::StrCat(params.g);
  md["p"] = absl::StrCat(params.p);
  md["q"] = absl::StrCat(params.q);
  md["repetitions"] = absl::StrCat(config.repetitions);
  md["seed"] = absl::StrCat(config.base_seed.value);
  md["alpha"] = absl::StrCat(config.alpha);
  md["grid_size"] = absl::StrCat(
      config.grid_size > 0 ? config.grid_size : DefaultGridSize(config.data.n));
  md["set_samples"] = absl::StrCat(config.set_samples);
}

// Tracks the fitted power-law exponent across repetitions.
struct PriorTracker {
  RunningStat exponent;
  int clamped = 0;

  void Add(const RepetitionOutput& out) {
    for (const MethodOutput& m : out.outputs) {
      if (!m.prior) continue;
      exponent.Add(m.prior->exponent);
      if (m.prior->exponent_clamped) ++clamped;
      return;
    }
  }
  void Fill(ExperimentResult& result) const {
    if (exponent.count() == 0) return;
    result.metadata["power_exponent_mean"] = absl::StrCat(exponent.mean());
    result.metadata["power_exponent_clamped_reps"] = absl::StrCat(clamped);
  }
};

}  // namespace

absl::Status ExperimentConfig::Validate() const {
  const size_t d = data.d();
  if (d < 2) return absl::InvalidArgumentError("dataset needs at least 2 values");
  if (d > (size_t{1} << 32)) {
    return absl::InvalidArgumentError("domain larger than 2^32 values");
  }
  if (data.n < 1) return absl::InvalidArgumentError("dataset population is 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  if (methods.empty()) return absl::InvalidArgumentError("no methods selected");
  std::unordered_set<int> seen;
  for (Method m : methods) {
    if (!seen.insert(static_cast<int>(m)).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("method listed twice: ", MethodName(m)));
    }
  }
  if (repetitions < 1) {
    return absl::InvalidArgumentError("repetitions must be at least 1");
  }
  if (threads < 1) return absl::InvalidArgumentError("threads must be >= 1");
  if (set_samples < 1) {
    return absl::InvalidArgumentError("set samples must be at least 1");
  }
  if (!(alpha > 0.0) || !(alpha < static_cast<double>(d))) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in (0, d), got ", alpha));
  }
  if (queries.empty()) return absl::InvalidArgumentError("no queries");
  for (const QuerySpec& q : queries) {
    if (absl::Status s = ValidateQuery(q, d); !s.ok()) return s;
  }
  return absl::OkStatus();
}

MethodContext ExperimentConfig::Context(const PerturbParams& params) const {
  MethodContext ctx;
  ctx.params = params;
  ctx.n = data.n;
  ctx.alpha = alpha;
  ctx.grid_size = grid_size;
  return ctx;
}

absl::StatusOr<RepetitionOutput> RunOnce(const ExperimentConfig& config,
                                         int rep_index) {
  absl::StatusOr<PerturbParams> params = PerturbParams::Make(
      config.protocol, config.epsilon, static_cast<int64_t>(config.data.d()));
  if (!params.ok()) return params.status();
  const RngSeed rep_seed =
      DeriveSeed(config.base_seed, static_cast<uint64_t>(rep_index));
  const std::vector<uint32_t> users =
      SampleUsers(config.data, DeriveSeed(rep_seed, kUserStream));
  absl::StatusOr<SupportCounts> counts = SimulateSupportCounts(
      users, *params, DeriveSeed(rep_seed, kOracleStream));
  if (!counts.ok()) return counts.status();
  absl::StatusOr<EstimateVector> raw = Estimate(*counts, *params);
  if (!raw.ok()) return raw.status();

  RepetitionOutput out;
  out.raw = std::move(*raw);
  const MethodContext ctx = config.Context(*params);
  for (Method m : config.methods) {
    const auto start = std::chrono::steady_clock::now();
    absl::StatusOr<MethodOutput> processed = ApplyMethod(m, out.raw, ctx);
    const auto stop = std::chrono::steady_clock::now();
    if (!processed.ok()) {
      return absl::Status(processed.status().code(),
                          absl::StrCat(MethodName(m), ": ",
                                       processed.status().message()));
    }
    out.outputs.push_back(std::move(*processed));
    out.seconds.push_back(std::chrono::duration<double>(stop - start).count());
  }
  return out;
}

absl::StatusOr<ExperimentResult> RunMseExperiment(
    const ExperimentConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  absl::StatusOr<PerturbParams> params = PerturbParams::Make(
      config.protocol, config.epsilon, static_cast<int64_t>(config.data.d()));
  if (!params.ok()) return params.status();

  ExperimentResult result;
  result.experiment = "mse";
  result.config = config;
  result.config.progress = nullptr;
  result.methods = EmptySummaries(config);
  FillMetadata(config, *params, result);

  const size_t num_queries = config.queries.size();
  std::vector<RunningStat> stats(config.methods.size() * num_queries);
  PriorTracker priors;
  absl::Status status = ForEachRepetition(
      config, [&](int rep, const RepetitionOutput& out) -> absl::Status {
        for (size_t qi = 0; qi < num_queries; ++qi) {
          const QuerySpec& query = config.queries[qi];
          const auto sets = QuerySets(config, query, rep, qi);
          for (size_t mi = 0; mi < config.methods.size(); ++mi) {
            stats[mi * num_queries + qi].Add(
                Evaluate(config, query, sets, out.outputs[mi].est));
          }
        }
        for (size_t mi = 0; mi < config.methods.size(); ++mi) {
          result.methods[mi].wall_time += out.seconds[mi];
        }
        priors.Add(out);
        return absl::OkStatus();
      });
  if (!status.ok()) return status;

  for (size_t mi = 0; mi < config.methods.size(); ++mi) {
    for (size_t qi = 0; qi < num_queries; ++qi) {
      const RunningStat& st = stats[mi * num_queries + qi];
      result.records.push_back(MetricRecord{
          config.methods[mi], MetricName(config.queries[qi].kind),
          MetricParam(config.queries[qi]), st.mean(), st.stddev()});
    }
  }
  priors.Fill(result);
  return result;
}

absl::StatusOr<ExperimentResult> RunBiasVariance(
    const ExperimentConfig& config) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  absl::StatusOr<PerturbParams> params = PerturbParams::Make(
      config.protocol, config.epsilon, static_cast<int64_t>(config.data.d()));
  if (!params.ok()) return params.status();

  ExperimentResult result;
  result.experiment = "bias-variance";
  result.config = config;
  result.config.progress = nullptr;
  result.methods = EmptySummaries(config);
  FillMetadata(config, *params, result);

  const size_t d = config.data.d();
  const size_t num_methods = config.methods.size();
  std::vector<RunningStat> per_value(num_methods * d);
  std::vector<RunningStat> bias_sum(num_methods);
  std::vector<RunningStat> mse(num_methods);
  PriorTracker priors;
  absl::Status status = ForEachRepetition(
      config, [&](int, const RepetitionOutput& out) -> absl::Status {
        for (size_t mi = 0; mi < num_methods; ++mi) {
          const ProcessedEstimate& est = out.outputs[mi].est;
          double sum = 0.0;
          for (size_t v = 0; v < d; ++v) {
            const uint32_t member = static_cast<uint32_t>(v);
            const double answer = QueryAnswer(est, {&member, 1});
            per_value[mi * d + v].Add(answer);
            sum += answer - config.data.freqs[v];
          }
          bias_sum[mi].Add(sum);
          mse[mi].Add(MseFull(config.data, est));
          result.methods[mi].wall_time += out.seconds[mi];
        }
        priors.Add(out);
        return absl::OkStatus();
      });
  if (!status.ok()) return status;

  const double n = static_cast<double>(config.data.n);
  for (size_t mi = 0; mi < num_methods; ++mi) {
    MethodSummary& summary = result.methods[mi];
    summary.bias.resize(d);
    summary.variance.resize(d);
    for (size_t v = 0; v < d; ++v) {
      const RunningStat& st = per_value[mi * d + v];
      summary.bias[v] = st.mean() - config.data.freqs[v];
      summary.variance[v] = st.variance();
    }
    const Method m = config.methods[mi];
    result.records.push_back(MetricRecord{m, "mse_full", "", mse[mi].mean(),
                                          mse[mi].stddev()});
    result.records.push_back(MetricRecord{m, "bias_sum", "",
                                          bias_sum[mi].mean(),
                                          bias_sum[mi].stddev()});
    for (size_t v = 0; v < d; ++v) {
      const RunningStat& st = per_value[mi * d + v];
      result.records.push_back(MetricRecord{m, "bias_count", absl::StrCat(v),
                                            summary.bias[v] * n,
                                            st.stddev() * n});
    }
    for (size_t v = 0; v < d; ++v) {
      result.records.push_back(MetricRecord{m, "variance_count",
                                            absl::StrCat(v),
                                            summary.variance[v] * n * n, 0.0});
    }
  }
  priors.Fill(result);
  return result;
}

double EquivalentNumerator(const PerturbParams& params) {
  const double c = params.p - params.q;
  return params.q * (1.0 - params.q) / (c * c) +
         (1.0 - params.p - params.q) / (static_cast<double>(params.d) * c);
}

absl::StatusOr<double> EquivalentN(const PerturbParams& params, double mse) {
  if (!(mse > 0.0)) {
    return absl::FailedPreconditionError(
        "equivalent population is undefined for zero error");
  }
  return EquivalentNumerator(params) / mse;
}

absl::StatusOr<ExperimentResult> RunEquivalentN(
    const ExperimentConfig& config) {
  ExperimentConfig full = config;
  full.queries = {QuerySpec::Full()};
  absl::StatusOr<ExperimentResult> result = RunMseExperiment(full);
  if (!result.ok()) return result.status();
  absl::StatusOr<PerturbParams> params = PerturbParams::Make(
      config.protocol, config.epsilon, static_cast<int64_t>(config.data.d()));
  if (!params.ok()) return params.status();

  result->experiment = "equivalent-n";
  const double n = static_cast<double>(config.data.n);
  std::vector<MetricRecord> records;
  for (const MetricRecord& r : result->records) {
    records.push_back(r);
    absl::StatusOr<double> n_prime = EquivalentN(*params, r.value);
    if (!n_prime.ok()) {
      return absl::Status(n_prime.status().code(),
                          absl::StrCat(MethodName(r.method), ": ",
                                       n_prime.status().message()));
    }
    // Spread by the delta method: sd(K/X) ~ (K/X) sd(X)/X.
    const double spread = *n_prime * r.std / r.value;
    records.push_back(MetricRecord{r.method, "n_prime", "", *n_prime, spread});
    records.push_back(
        MetricRecord{r.method, "n_prime_ratio", "", *n_prime / n, spread / n});
  }
  result->records = std::move(records);
  return result;
}

absl::StatusOr<ExperimentResult> SelectMethodSynthetic(
    const EstimateVector& est, const ExperimentConfig& config,
    Method consistency) {
  if (consistency != Method::kNormSub && consistency != Method::kPowerNs) {
    return absl::InvalidArgumentError(absl::StrCat(
        "consistency method must be norm-sub or power-ns, got ",
        MethodName(consistency)));
  }
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  if (est.d() != config.data.d()) {
    return absl::InvalidArgumentError("estimate does not match the domain");
  }
  absl::StatusOr<PerturbParams> params = PerturbParams::Make(
      config.protocol, config.epsilon, static_cast<int64_t>(config.data.d()));
  if (!params.ok()) return params.status();
  absl::StatusOr<MethodOutput> fitted =
      ApplyMethod(consistency, est, config.Context(*params));
  if (!fitted.ok()) return fitted.status();
  absl::StatusOr<DomainDistribution> synthetic =
      DistributionFromFrequencies(fitted->est.est, config.data.n);
  if (!synthetic.ok()) return synthetic.status();
  synthetic->labels = config.data.labels;

  ExperimentConfig sim = config;
  sim.data = std::move(*synthetic);
  sim.queries = {config.queries.front()};
  sim.base_seed = DeriveSeed(config.base_seed, kSyntheticStream);
  absl::StatusOr<ExperimentResult> result = RunMseExperiment(sim);
  if (!result.ok()) return result.status();

  result->experiment = "select-method";
  result->metadata["consistency"] = std::string(MethodName(consistency));
  std::optional<Method> best;
  double best_value = 0.0;
  for (Method m : kAllMethods) {
    for (const MetricRecord& r : result->records) {
      if (r.method != m) continue;
      if (!best || r.value < best_value) {
        best = m;
        best_value = r.value;
      }
    }
  }
  for (MetricRecord& r : result->records) r.metric = "synthetic_" + r.metric;
  result->records.push_back(MetricRecord{
      *best, "selected", std::string(MethodName(consistency)), 1.0, 0.0});
  result->selected = best;
  result->metadata["selected_method"] = std::string(MethodName(*best));
  return result;
}

absl::StatusOr<ExperimentResult> RunSelectMethod(const ExperimentConfig& config,
                                                 Method consistency) {
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  absl::StatusOr<RepetitionOutput> real = RunOnce(config, 0);
  if (!real.ok()) return real.status();
  absl::StatusOr<ExperimentResult> result =
      SelectMethodSynthetic(real->raw, config, consistency);
  if (!result.ok()) return result.status();

  // Error of each candidate on the real data for the same query, one run.
  result->config = config;
  result->config.progress = nullptr;
  const QuerySpec& query = config.queries.front();
  const auto sets = QuerySets(config, query, 0, 0);
  for (size_t mi = 0; mi < config.methods.size(); ++mi) {
    result->records.push_back(MetricRecord{
        config.methods[mi], "real_" + MetricName(query.kind),
        MetricParam(query),
        Evaluate(config, query, sets, real->outputs[mi].est), 0.0});
  }
  return result;
}

}  // namespace ldpfo
