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

#include "ldpfo/ldpfo.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "core/domain.h"
#include "core/method.h"
#include "harness/experiment.h"
#include "harness/report.h"
#include "oracles/frequency_oracle.h"
#include "postprocess/estimators.h"

struct ldpfo_dataset {
  ldpfo::DomainDistribution dist;
};

struct ldpfo_experiment {
  ldpfo::ExperimentConfig config;
  bool custom_queries = false;
  ldpfo_progress_fn progress = nullptr;
  void* progress_data = nullptr;
};

struct ldpfo_result {
  ldpfo::ExperimentResult result;
  std::vector<std::string> method_names;  // parallel to result.records
};

namespace {

thread_local std::string last_error;

ldpfo_status ToCode(absl::StatusCode code) {
  switch (code) {
    case absl::StatusCode::kOk:
      return LDPFO_OK;
    case absl::StatusCode::kInvalidArgument:
      return LDPFO_INVALID_ARGUMENT;
    case absl::StatusCode::kNotFound:
      return LDPFO_NOT_FOUND;
    case absl::StatusCode::kFailedPrecondition:
      return LDPFO_FAILED_PRECONDITION;
    case absl::StatusCode::kOutOfRange:
      return LDPFO_OUT_OF_RANGE;
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kDataLoss:
      return LDPFO_IO_ERROR;
    default:
      return LDPFO_INTERNAL;
  }
}

ldpfo_status Fail(const absl::Status& status) {
  last_error = std::string(status.message());
  return ToCode(status.code());
}

ldpfo_status Fail(ldpfo_status code, std::string message) {
  last_error = std::move(message);
  return code;
}

// Runs `body` and turns escaping exceptions into error codes, so nothing
// unwinds across the C boundary.
template <typename Body>
ldpfo_status Guard(Body&& body) {
  try {
    return body();
  } catch (const std::bad_alloc&) {
    return Fail(LDPFO_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(LDPFO_INTERNAL, e.what());
  } catch (...) {
    return Fail(LDPFO_INTERNAL, "unknown error");
  }
}

#define LDPFO_REQUIRE(cond, what)                                  \
  do {                                                             \
    if (!(cond)) return Fail(LDPFO_INVALID_ARGUMENT, (what));      \
  } while (0)

ldpfo::Protocol ToProtocol(ldpfo_oracle oracle) {
  return oracle == LDPFO_ORACLE_GRR ? ldpfo::Protocol::kGrr
                                    : ldpfo::Protocol::kOlh;
}

bool ValidOracle(ldpfo_oracle oracle) {
  return oracle == LDPFO_ORACLE_GRR || oracle == LDPFO_ORACLE_OLH;
}

ldpfo::PerturbParams FromC(const ldpfo_params& p) {
  ldpfo::PerturbParams out;
  out.protocol = ToProtocol(p.oracle);
  out.epsilon = p.epsilon;
  out.d = p.d;
  out.g = p.g;
  out.p = p.p;
  out.q = p.q;
  return out;
}

ldpfo_status NewDataset(absl::StatusOr<ldpfo::DomainDistribution> dist,
                        ldpfo_dataset** out) {
  if (!dist.ok()) return Fail(dist.status());
  *out = new ldpfo_dataset{std::move(*dist)};
  return LDPFO_OK;
}

ldpfo_status NewResult(absl::StatusOr<ldpfo::ExperimentResult> result,
                       ldpfo_result** out) {
  if (!result.ok()) return Fail(result.status());
  auto* r = new ldpfo_result{std::move(*result), {}};
  for (const auto& rec : r->result.records) {
    r->method_names.emplace_back(ldpfo::MethodName(rec.method));
  }
  *out = r;
  return LDPFO_OK;
}

// Hands `text` to the caller as a malloc'd C string.
ldpfo_status CopyOut(const std::string& text, char** out) {
  char* buffer = static_cast<char*>(std::malloc(text.size() + 1));
  if (buffer == nullptr) return Fail(LDPFO_INTERNAL, "out of memory");
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  *out = buffer;
  return LDPFO_OK;
}

// The config to run, with the C progress callback bound.
ldpfo::ExperimentConfig Runnable(const ldpfo_experiment* e) {
  ldpfo::ExperimentConfig config = e->config;
  if (e->progress) {
    ldpfo_progress_fn fn = e->progress;
    void* data = e->progress_data;
    config.progress = [fn, data](int done, int total) { fn(done, total, data); };
  }
  return config;
}

void AddQuery(ldpfo_experiment* e, ldpfo::QuerySpec query) {
  if (!e->custom_queries) {
    e->config.queries.clear();
    e->custom_queries = true;
  }
  e->config.queries.push_back(std::move(query));
}

}  // namespace

extern "C" {

const char* ldpfo_last_error(void) { return last_error.c_str(); }

const char* ldpfo_status_name(ldpfo_status status) {
  switch (status) {
    case LDPFO_OK:
      return "ok";
    case LDPFO_INVALID_ARGUMENT:
      return "invalid argument";
    case LDPFO_NOT_FOUND:
      return "not found";
    case LDPFO_FAILED_PRECONDITION:
      return "failed precondition";
    case LDPFO_OUT_OF_RANGE:
      return "out of range";
    case LDPFO_IO_ERROR:
      return "i/o error";
    case LDPFO_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* ldpfo_version(void) { return "1.0.0"; }

void ldpfo_string_free(char* s) { std::free(s); }

ldpfo_status ldpfo_dataset_zipf(int64_t d, int64_t n, double s,
                                ldpfo_dataset** out) {
  LDPFO_REQUIRE(out != nullptr, "out is null");
  return Guard([&] { return NewDataset(ldpfo::GenerateZipf(d, n, s), out); });
}

ldpfo_status ldpfo_dataset_load(const char* path, ldpfo_dataset** out) {
  LDPFO_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return Guard([&] { return NewDataset(ldpfo::LoadCounts(path), out); });
}

ldpfo_status ldpfo_dataset_from_counts(const int64_t* counts, size_t d,
                                       ldpfo_dataset** out) {
  LDPFO_REQUIRE(out != nullptr && (counts != nullptr || d == 0),
                "null argument");
  return Guard([&] {
    return NewDataset(ldpfo::DistributionFromCounts(
                          std::vector<int64_t>(counts, counts + d)),
                      out);
  });
}

ldpfo_status ldpfo_dataset_save(const ldpfo_dataset* dataset,
                                const char* path) {
  LDPFO_REQUIRE(dataset != nullptr && path != nullptr, "null argument");
  return Guard([&] {
    absl::Status s = ldpfo::SaveCounts(dataset->dist, path);
    return s.ok() ? LDPFO_OK : Fail(s);
  });
}

ldpfo_status ldpfo_dataset_format(const ldpfo_dataset* dataset, char** out) {
  LDPFO_REQUIRE(dataset != nullptr && out != nullptr, "null argument");
  return Guard([&] { return CopyOut(ldpfo::FormatCounts(dataset->dist), out); });
}

size_t ldpfo_dataset_size(const ldpfo_dataset* dataset) {
  return dataset ? dataset->dist.d() : 0;
}

int64_t ldpfo_dataset_population(const ldpfo_dataset* dataset) {
  return dataset ? dataset->dist.n : 0;
}

ldpfo_status ldpfo_dataset_frequencies(const ldpfo_dataset* dataset,
                                       double* out, size_t len) {
  LDPFO_REQUIRE(dataset != nullptr && out != nullptr, "null argument");
  if (len < dataset->dist.d()) {
    return Fail(LDPFO_OUT_OF_RANGE,
                absl::StrCat("buffer holds ", len, " entries, need ",
                             dataset->dist.d()));
  }
  std::copy(dataset->dist.freqs.begin(), dataset->dist.freqs.end(), out);
  return LDPFO_OK;
}

ldpfo_status ldpfo_dataset_counts(const ldpfo_dataset* dataset, int64_t* out,
                                  size_t len) {
  LDPFO_REQUIRE(dataset != nullptr && out != nullptr, "null argument");
  if (len < dataset->dist.d()) {
    return Fail(LDPFO_OUT_OF_RANGE,
                absl::StrCat("buffer holds ", len, " entries, need ",
                             dataset->dist.d()));
  }
  std::copy(dataset->dist.counts.begin(), dataset->dist.counts.end(), out);
  return LDPFO_OK;
}

void ldpfo_dataset_free(ldpfo_dataset* dataset) { delete dataset; }

ldpfo_status ldpfo_oracle_parse(const char* name, ldpfo_oracle* out) {
  LDPFO_REQUIRE(name != nullptr && out != nullptr, "null argument");
  absl::StatusOr<ldpfo::Protocol> p = ldpfo::ParseProtocol(name);
  if (!p.ok()) return Fail(p.status());
  *out = *p == ldpfo::Protocol::kGrr ? LDPFO_ORACLE_GRR : LDPFO_ORACLE_OLH;
  return LDPFO_OK;
}

ldpfo_status ldpfo_params_make(ldpfo_oracle oracle, double epsilon, int64_t d,
                               ldpfo_params* out) {
  LDPFO_REQUIRE(out != nullptr, "out is null");
  LDPFO_REQUIRE(ValidOracle(oracle), "unknown oracle");
  absl::StatusOr<ldpfo::PerturbParams> p =
      ldpfo::PerturbParams::Make(ToProtocol(oracle), epsilon, d);
  if (!p.ok()) return Fail(p.status());
  *out = ldpfo_params{oracle, p->epsilon, p->d, p->g, p->p, p->q};
  return LDPFO_OK;
}

ldpfo_status ldpfo_simulate(const ldpfo_dataset* dataset,
                            const ldpfo_params* params, uint64_t seed,
                            double* est_out, size_t len) {
  LDPFO_REQUIRE(dataset && params && est_out, "null argument");
  LDPFO_REQUIRE(ValidOracle(params->oracle), "unknown oracle");
  LDPFO_REQUIRE(static_cast<size_t>(params->d) == dataset->dist.d(),
                "params domain size does not match the dataset");
  if (len < dataset->dist.d()) {
    return Fail(LDPFO_OUT_OF_RANGE, "estimate buffer too small");
  }
  return Guard([&] {
    const ldpfo::PerturbParams p = FromC(*params);
    const ldpfo::RngSeed root{seed};
    const auto users = ldpfo::SampleUsers(dataset->dist,
                                          ldpfo::DeriveSeed(root, 0));
    absl::StatusOr<ldpfo::SupportCounts> counts =
        ldpfo::SimulateSupportCounts(users, p, ldpfo::DeriveSeed(root, 1));
    if (!counts.ok()) return Fail(counts.status());
    absl::StatusOr<ldpfo::EstimateVector> est = ldpfo::Estimate(*counts, p);
    if (!est.ok()) return Fail(est.status());
    std::copy(est->est.begin(), est->est.end(), est_out);
    return LDPFO_OK;
  });
}

double ldpfo_analytic_variance(const ldpfo_params* params, int64_t n, int has_f,
                               double f) {
  if (params == nullptr || n < 1) return std::nan("");
  return has_f ? ldpfo::AnalyticVariance(FromC(*params), n, f)
               : ldpfo::AnalyticVariance(FromC(*params), n);
}

size_t ldpfo_method_count(void) { return ldpfo::kAllMethods.size(); }

const char* ldpfo_method_name(size_t index) {
  if (index >= ldpfo::kAllMethods.size()) return nullptr;
  // MethodName views string literals, so the data is NUL-terminated.
  return ldpfo::MethodName(ldpfo::kAllMethods[index]).data();
}

ldpfo_status ldpfo_postprocess(const char* method, const double* est, size_t d,
                               const ldpfo_params* params, int64_t n,
                               double alpha, size_t grid_size, double* out) {
  LDPFO_REQUIRE(method && est && params && out, "null argument");
  LDPFO_REQUIRE(ValidOracle(params->oracle), "unknown oracle");
  LDPFO_REQUIRE(n >= 1, "population must be at least 1");
  return Guard([&] {
    absl::StatusOr<ldpfo::Method> m = ldpfo::ParseMethod(method);
    if (!m.ok()) return Fail(m.status());
    ldpfo::MethodContext ctx;
    ctx.params = FromC(*params);
    ctx.n = n;
    ctx.alpha = alpha;
    ctx.grid_size = grid_size;
    ldpfo::EstimateVector input{std::vector<double>(est, est + d)};
    absl::StatusOr<ldpfo::MethodOutput> result =
        ldpfo::ApplyMethod(*m, input, ctx);
    if (!result.ok()) return Fail(result.status());
    std::copy(result->est.est.begin(), result->est.est.end(), out);
    return LDPFO_OK;
  });
}

ldpfo_status ldpfo_experiment_create(const ldpfo_dataset* dataset,
                                     ldpfo_experiment** out) {
  LDPFO_REQUIRE(dataset != nullptr && out != nullptr, "null argument");
  return Guard([&] {
    auto* e = new ldpfo_experiment;
    e->config.data = dataset->dist;
    *out = e;
    return LDPFO_OK;
  });
}

void ldpfo_experiment_free(ldpfo_experiment* experiment) { delete experiment; }

ldpfo_status ldpfo_experiment_set_label(ldpfo_experiment* e,
                                        const char* label) {
  LDPFO_REQUIRE(e && label, "null argument");
  e->config.dataset = label;
  return LDPFO_OK;
}

ldpfo_status ldpfo_experiment_set_epsilon(ldpfo_experiment* e, double epsilon) {
  LDPFO_REQUIRE(e, "null experiment");
  LDPFO_REQUIRE(epsilon > 0.0 && std::isfinite(epsilon),
                "epsilon must be positive and finite");
  e->config.epsilon = epsilon;
  return LDPFO_OK;
}

ldpfo_status ldpfo_experiment_set_oracle(ldpfo_experiment* e,
                                         ldpfo_oracle oracle) {
  LDPFO_REQUIRE(e, "null experiment");
  LDPFO_REQUIRE(ValidOracle(oracle), "unknown oracle");
  e->config.protocol = ToProtocol(oracle);
  return LDPFO_OK;
}

ldpfo_status ldpfo_experiment_set_methods(ldpfo_experiment* e,
                                          const char* methods) {
  LDPFO_REQUIRE(e && methods, "null argument");
  return Guard([&] {
    absl::StatusOr<std::vector<ldpfo::Method>> list =
        ldpfo::ParseMethodList(methods);
    if (!list.ok()) return Fail(list.status());
    e->config.methods = std::move(*list);
    return LDPFO_OK;
  });
}

ldpfo_status ldpfo_experiment_set_repetitions(ldpfo_experiment* e,
                                              int repetitions) {
  LDPFO_REQUIRE(e, "null experiment");
  LDPFO_REQUIRE(repetitions >= 1, "repetitions must be at least 1");
  e->config.repetitions = repetitions;
  return LDPFO_OK;
}

ldpfo_status ldpfo_experiment_set_seed(ldpfo_experiment* e, uint64_t seed) {
  LDPFO_REQUIRE(e, "null experiment");
  e->config.base_seed = ldpfo::RngSeed{seed};
  return LDPFO_OK;
}

ldpfo_status ldpfo_experiment_set_alpha(ldpfo_experiment* e, double alpha) {
  LDPFO_REQUIRE(e, "null experiment");
  LDPFO_REQUIRE(alpha > 0.0 && alpha < static_cast<double>(e->config.data.d()),
                "alpha must lie in (0, d)");
  e->config.alpha = alpha;
  return LDPFO_OK;
}

ldpfo_status ldpfo_experiment_set_grid(ldpfo_experiment* e, size_t grid_size) {
  LDPFO_REQUIRE(e, "null experiment");
  e->config.grid_size = grid_size;
  return LDPFO_OK;
}

ldpfo_status ldpfo_experiment_set_threads(ldpfo_experiment* e, int threads) {
  LDPFO_REQUIRE(e, "null experiment");
  LDPFO_REQUIRE(threads >= 1, "threads must be at least 1");
  e->config.threads = threads;
  return LDPFO_OK;
}

ldpfo_status ldpfo_experiment_set_set_samples(ldpfo_experiment* e,
                                              int samples) {
  LDPFO_REQUIRE(e, "null experiment");
  LDPFO_REQUIRE(samples >= 1, "set samples must be at least 1");
  e->config.set_samples = samples;
  return LDPFO_OK;
}

ldpfo_status ldpfo_experiment_set_progress(ldpfo_experiment* e,
                                           ldpfo_progress_fn fn,
                                           void* user_data) {
  LDPFO_REQUIRE(e, "null experiment");
  e->progress = fn;
  e->progress_data = user_data;
  return LDPFO_OK;
}

ldpfo_status ldpfo_experiment_add_full_query(ldpfo_experiment* e) {
  LDPFO_REQUIRE(e, "null experiment");
  return Guard([&] {
    AddQuery(e, ldpfo::QuerySpec::Full());
    return LDPFO_OK;
  });
}

ldpfo_status ldpfo_experiment_add_set_query(ldpfo_experiment* e, double rho) {
  LDPFO_REQUIRE(e, "null experiment");
  return Guard([&] {
    ldpfo::QuerySpec q = ldpfo::QuerySpec::Set(rho);
    absl::Status s = ldpfo::ValidateQuery(q, e->config.data.d());
    if (!s.ok()) return Fail(s);
    AddQuery(e, std::move(q));
    return LDPFO_OK;
  });
}

ldpfo_status ldpfo_experiment_add_topk_query(ldpfo_experiment* e, int64_t k) {
  LDPFO_REQUIRE(e, "null experiment");
  return Guard([&] {
    ldpfo::QuerySpec q = ldpfo::QuerySpec::TopK(k);
    absl::Status s = ldpfo::ValidateQuery(q, e->config.data.d());
    if (!s.ok()) return Fail(s);
    AddQuery(e, std::move(q));
    return LDPFO_OK;
  });
}

ldpfo_status ldpfo_experiment_add_fixed_sets_query(ldpfo_experiment* e,
                                                   const char* path) {
  LDPFO_REQUIRE(e && path, "null argument");
  return Guard([&] {
    absl::StatusOr<ldpfo::FixedSets> sets =
        ldpfo::LoadFixedSets(path, e->config.data.d());
    if (!sets.ok()) return Fail(sets.status());
    AddQuery(e, ldpfo::QuerySpec::Fixed(std::move(*sets), path));
    return LDPFO_OK;
  });
}

ldpfo_status ldpfo_experiment_run(const ldpfo_experiment* e,
                                  ldpfo_result** out) {
  LDPFO_REQUIRE(e && out, "null argument");
  return Guard(
      [&] { return NewResult(ldpfo::RunMseExperiment(Runnable(e)), out); });
}

ldpfo_status ldpfo_experiment_bias_variance(const ldpfo_experiment* e,
                                            ldpfo_result** out) {
  LDPFO_REQUIRE(e && out, "null argument");
  return Guard(
      [&] { return NewResult(ldpfo::RunBiasVariance(Runnable(e)), out); });
}

ldpfo_status ldpfo_experiment_equivalent_n(const ldpfo_experiment* e,
                                           ldpfo_result** out) {
  LDPFO_REQUIRE(e && out, "null argument");
  return Guard(
      [&] { return NewResult(ldpfo::RunEquivalentN(Runnable(e)), out); });
}

ldpfo_status ldpfo_experiment_select_method(const ldpfo_experiment* e,
                                            const char* consistency,
                                            ldpfo_result** out) {
  LDPFO_REQUIRE(e && consistency && out, "null argument");
  return Guard([&] {
    absl::StatusOr<ldpfo::Method> m = ldpfo::ParseMethod(consistency);
    if (!m.ok()) return Fail(m.status());
    return NewResult(ldpfo::RunSelectMethod(Runnable(e), *m), out);
  });
}

size_t ldpfo_result_record_count(const ldpfo_result* r) {
  return r ? r->result.records.size() : 0;
}

ldpfo_status ldpfo_result_record(const ldpfo_result* r, size_t index,
                                 ldpfo_record* out) {
  LDPFO_REQUIRE(r && out, "null argument");
  if (index >= r->result.records.size()) {
    return Fail(LDPFO_OUT_OF_RANGE, "record index out of range");
  }
  const auto& rec = r->result.records[index];
  *out = ldpfo_record{r->method_names[index].c_str(), rec.metric.c_str(),
                      rec.param.c_str(), rec.value, rec.std};
  return LDPFO_OK;
}

const char* ldpfo_result_selected_method(const ldpfo_result* r) {
  if (!r || !r->result.selected) return nullptr;
  return ldpfo::MethodName(*r->result.selected).data();
}

const char* ldpfo_result_metadata(const ldpfo_result* r, const char* key) {
  if (!r || !key) return nullptr;
  auto it = r->result.metadata.find(key);
  return it == r->result.metadata.end() ? nullptr : it->second.c_str();
}

ldpfo_status ldpfo_result_serialize(const ldpfo_result* r, ldpfo_format format,
                                    char** out) {
  LDPFO_REQUIRE(r && out, "null argument");
  LDPFO_REQUIRE(format == LDPFO_FORMAT_CSV || format == LDPFO_FORMAT_JSON,
                "unknown format");
  return Guard([&] {
    return CopyOut(format == LDPFO_FORMAT_CSV ? ldpfo::FormatCsv(r->result)
                                              : ldpfo::FormatJson(r->result),
                   out);
  });
}

ldpfo_status ldpfo_result_write(const ldpfo_result* r, ldpfo_format format,
                                const char* path) {
  LDPFO_REQUIRE(r && path, "null argument");
  char* text = nullptr;
  if (ldpfo_status s = ldpfo_result_serialize(r, format, &text); s != LDPFO_OK) {
    return s;
  }
  return Guard([&] {
    std::ofstream out(path, std::ios::binary);
    const bool ok = out && (out << text) && out.flush();
    ldpfo_string_free(text);
    if (!ok) {
      return Fail(LDPFO_IO_ERROR, absl::StrCat("cannot write '", path, "'"));
    }
    return LDPFO_OK;
  });
}

void ldpfo_result_free(ldpfo_result* r) { delete r; }

}  // extern "C"
