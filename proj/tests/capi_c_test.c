/* Copyright 2026 The ldpfo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Compiles the public header as C and makes a few calls. */

#include <stdio.h>

#include "ldpfo/ldpfo.h"

int main(void) {
  ldpfo_dataset* ds = NULL;
  ldpfo_params params;
  double est[8];
  double out[8];
  double total = 0.0;
  size_t i;
  if (ldpfo_dataset_zipf(8, 1000, 1.0, &ds) != LDPFO_OK) return 1;
  if (ldpfo_params_make(LDPFO_ORACLE_GRR, 2.0, 8, &params) != LDPFO_OK) return 1;
  if (ldpfo_simulate(ds, &params, 3, est, 8) != LDPFO_OK) return 1;
  if (ldpfo_postprocess("norm-sub", est, 8, &params, 1000, 2.0, 0, out) !=
      LDPFO_OK) {
    fprintf(stderr, "%s\n", ldpfo_last_error());
    return 1;
  }
  for (i = 0; i < 8; ++i) total += out[i];
  ldpfo_dataset_free(ds);
  if (total < 1.0 - 1e-9 || total > 1.0 + 1e-9) return 1;
  printf("ok %s\n", ldpfo_version());
  return 0;
}
