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

/* C interface to the ldpfo library: frequency oracles, post-processing
 * methods and the Monte-Carlo experiment harness.
 *
 * Objects are opaque handles created by `*_create`/`*_zipf`/`*_load` style
 * functions and released with the matching `*_free`. Functions return an
 * ldpfo_status; on failure a description is available from
 * ldpfo_last_error() on the calling thread until the next failing call.
 * Strings returned through `char**` are owned by the caller and released
 * with ldpfo_string_free. Other returned strings live as long as the handle
 * they came from (or forever, for static names). */

#ifndef LDPFO_LDPFO_H_
#define LDPFO_LDPFO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(LDPFO_BUILDING_LIBRARY)
#define LDPFO_API __declspec(dllexport)
#else
#define LDPFO_API __declspec(dllimport)
#endif
#else
#define LDPFO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ldpfo_status {
  LDPFO_OK = 0,
  LDPFO_INVALID_ARGUMENT = 1,
  LDPFO_NOT_FOUND = 2,
  LDPFO_FAILED_PRECONDITION = 3,
  LDPFO_OUT_OF_RANGE = 4,
  LDPFO_IO_ERROR = 5,
  LDPFO_INTERNAL = 6
} ldpfo_status;

typedef enum ldpfo_oracle { LDPFO_ORACLE_GRR = 0, LDPFO_ORACLE_OLH = 1 } ldpfo_oracle;

typedef enum ldpfo_format { LDPFO_FORMAT_CSV = 0, LDPFO_FORMAT_JSON = 1 } ldpfo_format;

typedef struct ldpfo_dataset ldpfo_dataset;
typedef struct ldpfo_experiment ldpfo_experiment;
typedef struct ldpfo_result ldpfo_result;

/* (epsilon, d, g, p, q) of one oracle instance. For OLH, q is 1/g. */
typedef struct ldpfo_params {
  ldpfo_oracle oracle;
  double epsilon;
  int64_t d;
  int64_t g;
  double p;
  double q;
} ldpfo_params;

/* One `method,metric,param,value,std` row. Strings belong to the result. */
typedef struct ldpfo_record {
  const char* method;
  const char* metric;
  const char* param;
  double value;
  double std;
} ldpfo_record;

/* Called after each finished repetition. */
typedef void (*ldpfo_progress_fn)(int done, int total, void* user_data);

LDPFO_API const char* ldpfo_last_error(void);
LDPFO_API const char* ldpfo_status_name(ldpfo_status status);
LDPFO_API const char* ldpfo_version(void);
LDPFO_API void ldpfo_string_free(char* s);

/* ---- datasets ---- */

LDPFO_API ldpfo_status ldpfo_dataset_zipf(int64_t d, int64_t n, double s,
                                          ldpfo_dataset** out);
/* Newline-delimited `label,count` records. */
LDPFO_API ldpfo_status ldpfo_dataset_load(const char* path,
                                          ldpfo_dataset** out);
LDPFO_API ldpfo_status ldpfo_dataset_from_counts(const int64_t* counts,
                                                 size_t d,
                                                 ldpfo_dataset** out);
LDPFO_API ldpfo_status ldpfo_dataset_save(const ldpfo_dataset* dataset,
                                          const char* path);
/* The dataset as `label,count` text. */
LDPFO_API ldpfo_status ldpfo_dataset_format(const ldpfo_dataset* dataset,
                                            char** out);
LDPFO_API size_t ldpfo_dataset_size(const ldpfo_dataset* dataset);
LDPFO_API int64_t ldpfo_dataset_population(const ldpfo_dataset* dataset);
/* Copies d frequencies (or counts) into `out`, which holds `len` entries. */
LDPFO_API ldpfo_status ldpfo_dataset_frequencies(const ldpfo_dataset* dataset,
                                                 double* out, size_t len);
LDPFO_API ldpfo_status ldpfo_dataset_counts(const ldpfo_dataset* dataset,
                                            int64_t* out, size_t len);
LDPFO_API void ldpfo_dataset_free(ldpfo_dataset* dataset);

/* ---- oracles ---- */

LDPFO_API ldpfo_status ldpfo_oracle_parse(const char* name, ldpfo_oracle* out);
LDPFO_API ldpfo_status ldpfo_params_make(ldpfo_oracle oracle, double epsilon,
                                         int64_t d, ldpfo_params* out);
/* One full oracle run over the dataset's population: sample users, perturb,
 * aggregate, estimate. Writes d raw estimates to `est_out`. */
LDPFO_API ldpfo_status ldpfo_simulate(const ldpfo_dataset* dataset,
                                      const ldpfo_params* params,
                                      uint64_t seed, double* est_out,
                                      size_t len);
/* Variance of one estimate; pass has_f = 0 for the frequency-free form. */
LDPFO_API double ldpfo_analytic_variance(const ldpfo_params* params, int64_t n,
                                         int has_f, double f);

/* ---- post-processing ---- */

LDPFO_API size_t ldpfo_method_count(void);
/* Method identifiers in their fixed order; NULL past the end. */
LDPFO_API const char* ldpfo_method_name(size_t index);
/* Applies `method` to d raw estimates. alpha is the Base-Cut expected false
 * positive count; grid_size 0 selects ceil(sqrt(n)) for Power. */
LDPFO_API ldpfo_status ldpfo_postprocess(const char* method, const double* est,
                                         size_t d, const ldpfo_params* params,
                                         int64_t n, double alpha,
                                         size_t grid_size, double* out);

/* ---- experiments ---- */

/* Copies the dataset. Defaults: OLH, epsilon 1, all methods, 30 repetitions,
 * seed 0, alpha 2, grid ceil(sqrt(n)), 1 thread, 100 subsets per set query,
 * full-domain query. */
LDPFO_API ldpfo_status ldpfo_experiment_create(const ldpfo_dataset* dataset,
                                               ldpfo_experiment** out);
LDPFO_API void ldpfo_experiment_free(ldpfo_experiment* experiment);

LDPFO_API ldpfo_status ldpfo_experiment_set_label(ldpfo_experiment* e,
                                                  const char* label);
LDPFO_API ldpfo_status ldpfo_experiment_set_epsilon(ldpfo_experiment* e,
                                                    double epsilon);
LDPFO_API ldpfo_status ldpfo_experiment_set_oracle(ldpfo_experiment* e,
                                                   ldpfo_oracle oracle);
/* Comma-separated identifiers or "all". */
LDPFO_API ldpfo_status ldpfo_experiment_set_methods(ldpfo_experiment* e,
                                                    const char* methods);
LDPFO_API ldpfo_status ldpfo_experiment_set_repetitions(ldpfo_experiment* e,
                                                        int repetitions);
LDPFO_API ldpfo_status ldpfo_experiment_set_seed(ldpfo_experiment* e,
                                                 uint64_t seed);
LDPFO_API ldpfo_status ldpfo_experiment_set_alpha(ldpfo_experiment* e,
                                                  double alpha);
LDPFO_API ldpfo_status ldpfo_experiment_set_grid(ldpfo_experiment* e,
                                                 size_t grid_size);
LDPFO_API ldpfo_status ldpfo_experiment_set_threads(ldpfo_experiment* e,
                                                    int threads);
LDPFO_API ldpfo_status ldpfo_experiment_set_set_samples(ldpfo_experiment* e,
                                                        int samples);
LDPFO_API ldpfo_status ldpfo_experiment_set_progress(ldpfo_experiment* e,
                                                     ldpfo_progress_fn fn,
                                                     void* user_data);

/* The first added query replaces the default full-domain query. */
LDPFO_API ldpfo_status ldpfo_experiment_add_full_query(ldpfo_experiment* e);
LDPFO_API ldpfo_status ldpfo_experiment_add_set_query(ldpfo_experiment* e,
                                                      double rho);
LDPFO_API ldpfo_status ldpfo_experiment_add_topk_query(ldpfo_experiment* e,
                                                       int64_t k);
/* `set_id,member_index` records. */
LDPFO_API ldpfo_status ldpfo_experiment_add_fixed_sets_query(
    ldpfo_experiment* e, const char* path);

LDPFO_API ldpfo_status ldpfo_experiment_run(const ldpfo_experiment* e,
                                            ldpfo_result** out);
LDPFO_API ldpfo_status ldpfo_experiment_bias_variance(const ldpfo_experiment* e,
                                                      ldpfo_result** out);
LDPFO_API ldpfo_status ldpfo_experiment_equivalent_n(const ldpfo_experiment* e,
                                                     ldpfo_result** out);
/* consistency is "norm-sub" or "power-ns". */
LDPFO_API ldpfo_status ldpfo_experiment_select_method(
    const ldpfo_experiment* e, const char* consistency, ldpfo_result** out);

/* ---- results ---- */

LDPFO_API size_t ldpfo_result_record_count(const ldpfo_result* r);
LDPFO_API ldpfo_status ldpfo_result_record(const ldpfo_result* r, size_t index,
                                           ldpfo_record* out);
/* NULL unless the result comes from method selection. */
LDPFO_API const char* ldpfo_result_selected_method(const ldpfo_result* r);
/* NULL when the key is absent. */
LDPFO_API const char* ldpfo_result_metadata(const ldpfo_result* r,
                                            const char* key);
LDPFO_API ldpfo_status ldpfo_result_serialize(const ldpfo_result* r,
                                              ldpfo_format format, char** out);
LDPFO_API ldpfo_status ldpfo_result_write(const ldpfo_result* r,
                                          ldpfo_format format,
                                          const char* path);
LDPFO_API void ldpfo_result_free(ldpfo_result* r);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* LDPFO_LDPFO_H_ */
