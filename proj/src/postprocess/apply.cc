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

#include "postprocess/estimators.h"

namespace ldpfo {
namespace {

absl::StatusOr<MethodOutput> FromSolver(absl::StatusOr<SolverResult> result) {
  if (!result.ok()) return result.status();
  return MethodOutput{std::move(result->est), std::nullopt};
}

}  // namespace

absl::StatusOr<MethodOutput> ApplyMethod(Method method,
                                         const EstimateVector& est,
                                         const MethodContext& ctx) {
  const NoiseModel noise = NoiseModel::For(ctx.params, ctx.n);
  switch (method) {
    case Method::kBase:
      return MethodOutput{Base(est), std::nullopt};
    case Method::kBasePos:
      return MethodOutput{BasePos(est), std::nullopt};
    case Method::kPostPos:
      return MethodOutput{PostPosEstimate(est), std::nullopt};
    case Method::kBaseCut: {
      absl::StatusOr<CutConfig> cfg = CutConfig::For(ctx.alpha, est.d(), noise);
      if (!cfg.ok()) return cfg.status();
      return MethodOutput{BaseCut(est, *cfg), std::nullopt};
    }
    case Method::kNorm:
      return MethodOutput{Norm(est), std::nullopt};
    case Method::kNormMul:
      return FromSolver(NormMul(est));
    case Method::kNormCut:
      return FromSolver(NormCut(est));
    case Method::kNormSub:
      return FromSolver(NormSub(est));
    case Method::kMleApx:
      return FromSolver(MleApx(est, ctx.params));
    case Method::kPower:
    case Method::kPowerNs: {
      const size_t grid =
          ctx.grid_size > 0 ? ctx.grid_size : DefaultGridSize(ctx.n);
      absl::StatusOr<PowerPrior> prior =
          FitPowerPrior(est, noise.sigma(), grid);
      if (!prior.ok()) return prior.status();
      absl::StatusOr<ProcessedEstimate> out =
          method == Method::kPower ? Power(est, *prior, noise)
                                   : PowerNs(est, *prior, noise);
      if (!out.ok()) return out.status();
      return MethodOutput{std::move(*out), *prior};
    }
  }
  return absl::InvalidArgumentError("unknown method");
}

}  // namespace ldpfo
