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

// MLE-Apx: maximum likelihood under f~_v ~ N(f'_v, sigma_v(f'_v)^2) with the
// consistency constraints.
//
// With c = p - q, A = q(1-q) and B = c(1-p-q), each term of the objective is
// c^2 (f' - f~)^2 / (A + B f'). Its derivative in f' is 2cx - Bx^2 where
//
//   x = c (f' - f~) / (A + B f'),  equivalently  f' = (A x + c f~) / (c - B x).
//
// On the free set D1 stationarity makes x a common value. Summing f' over D1
// and setting the sum to 1 gives
//
//   x = c (1 - S) / (|D1| A + B),  S = sum_{D1} f~_v.
//
// D0 starts empty; entries that come out negative move to D0 and the system
// is re-solved. The implied cut-off on f~ rises monotonically, so entries never
// need to return to D1 and the loop ends after at most d rounds.
//
// The objective is convex, and the result is its minimizer whenever every
// f~_v >= -A/B. Below that bound the true minimizer is no longer monotone in
// f~ (the growing variance term pulls very negative entries up); the
// procedure here stays order-preserving instead.

#include <cmath>

#include "absl/strings/str_cat.h"
#include "postprocess/estimators.h"

namespace ldpfo {

absl::StatusOr<SolverResult> MleApx(const EstimateVector& est,
                                    const PerturbParams& params) {
  const double c = params.p - params.q;
  const double a = params.q * (1.0 - params.q);
  const double b = c * (1.0 - params.p - params.q);
  if (!(c > 0.0) || !(a > 0.0)) {
    return absl::InvalidArgumentError(
        "mle-apx needs 0 < q < p < 1 in the privacy parameters");
  }

  const size_t d = est.d();
  std::vector<double> out(d, 0.0);
  std::vector<char> free_set(d, 1);
  size_t free_count = d;

  SolverResult result;
  for (int iteration = 1; iteration <= static_cast<int>(d) + 1; ++iteration) {
    if (free_count == 0) break;
    double sum = 0.0;
    for (size_t v = 0; v < d; ++v) {
      if (free_set[v]) sum += est.est[v];
    }
    const double x =
        c * (1.0 - sum) / (static_cast<double>(free_count) * a + b);
    const double denom = c - b * x;
    bool moved = false;
    if (!(denom > 0.0)) {
      // Only reached when free entries sit below -A/B. The closed form would
      // reverse their order, so the smallest moves to D0; a last survivor
      // takes all the mass.
      size_t smallest = d;
      for (size_t v = 0; v < d; ++v) {
        if (free_set[v] && (smallest == d || est.est[v] < est.est[smallest])) {
          smallest = v;
        }
      }
      if (free_count == 1) {
        out[smallest] = 1.0;
      } else {
        free_set[smallest] = 0;
        out[smallest] = 0.0;
        --free_count;
        moved = true;
      }
    } else {
      for (size_t v = 0; v < d; ++v) {
        if (!free_set[v]) continue;
        out[v] = (a * x + c * est.est[v]) / denom;
        if (out[v] < 0.0) {
          free_set[v] = 0;
          out[v] = 0.0;
          --free_count;
          moved = true;
        }
      }
    }
    if (!moved) {
      result.multiplier = x;
      result.iterations = iteration;
      for (size_t v = 0; v < d; ++v) {
        if (out[v] == 0.0) result.zero_set.push_back(v);
      }
      result.est.est = std::move(out);
      result.est.method = Method::kMleApx;
      result.est.nonneg_guaranteed = true;
      result.est.sums_to_one_guaranteed = true;
      return result;
    }
  }
  return absl::InternalError(absl::StrCat(
      "mle-apx active-set iteration did not converge within ", d + 1,
      " rounds"));
}

}  // namespace ldpfo
