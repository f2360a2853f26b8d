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

#ifndef LDPFO_CORE_METHOD_H_
#define LDPFO_CORE_METHOD_H_

#include <array>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"

namespace ldpfo {

// Post-processing methods in their documented order. The order doubles as
// the tie-break order wherever methods are ranked.
enum class Method {
  kBase,
  kBasePos,
  kPostPos,
  kBaseCut,
  kNorm,
  kNormMul,
  kNormCut,
  kNormSub,
  kMleApx,
  kPower,
  kPowerNs,
};

inline constexpr std::array<Method, 11> kAllMethods = {
    Method::kBase,    Method::kBasePos, Method::kPostPos, Method::kBaseCut,
    Method::kNorm,    Method::kNormMul, Method::kNormCut, Method::kNormSub,
    Method::kMleApx,  Method::kPower,   Method::kPowerNs,
};

// Stable identifier, e.g. "norm-sub".
absl::string_view MethodName(Method method);

absl::StatusOr<Method> ParseMethod(absl::string_view name);

// Parses a comma-separated list or the word "all". Duplicates are rejected.
absl::StatusOr<std::vector<Method>> ParseMethodList(absl::string_view list);

}  // namespace ldpfo

#endif  // LDPFO_CORE_METHOD_H_
