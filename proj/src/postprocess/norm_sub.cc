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

// Norm-Sub: find delta with sum_v max(f~_v + delta, 0) = 1.
//
// The output is the Euclidean projection of f~ onto the probability simplex.
// Stationarity gives f'_v = f~_v + delta on the free set D1 and f'_v = 0 on
// D0 = {v : f~_v + delta <= 0}, and summing over D1 fixes
// delta = (1 - sum_{D1} f~_v) / |D1|. Because D0 is always a set of smallest
// entries, sorting once and scanning prefixes finds the fixed point directly.

#include <algorithm>
#include <functional>

#include "postprocess/estimators.h"

namespace ldpfo {

SolverResult NormSub(std::vector<double> values) {
  SolverResult result;
  result.iterations = 1;
  if (values.empty()) {
    result.est.method = Method::kNormSub;
    return result;
  }

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  // The largest prefix size k with sorted[k-1] + (1 - S_k)/k > 0 is |D1|.
  double prefix = 0.0;
  double delta = 1.0 - sorted[0];
  for (size_t k = 1; k <= sorted.size(); ++k) {
    prefix += sorted[k - 1];
    const double candidate = (1.0 - prefix) / static_cast<double>(k);
    if (sorted[k - 1] + candidate > 0.0) delta = candidate;
  }

  for (size_t v = 0; v < values.size(); ++v) {
    values[v] = std::max(values[v] + delta, 0.0);
    if (values[v] == 0.0) result.zero_set.push_back(v);
  }
  result.shift = delta;
  result.est.est = std::move(values);
  result.est.method = Method::kNormSub;
  result.est.nonneg_guaranteed = true;
  result.est.sums_to_one_guaranteed = true;
  return result;
}

SolverResult NormSub(const EstimateVector& est) { return NormSub(est.est); }

}  // namespace ldpfo
