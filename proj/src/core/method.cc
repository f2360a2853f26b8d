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

#include "core/method.h"

#include <algorithm>
#include <string>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace ldpfo {

absl::string_view MethodName(Method method) {
  switch (method) {
    case Method::kBase:
      return "base";
    case Method::kBasePos:
      return "base-pos";
    case Method::kPostPos:
      return "post-pos";
    case Method::kBaseCut:
      return "base-cut";
    case Method::kNorm:
      return "norm";
    case Method::kNormMul:
      return "norm-mul";
    case Method::kNormCut:
      return "norm-cut";
    case Method::kNormSub:
      return "norm-sub";
    case Method::kMleApx:
      return "mle-apx";
    case Method::kPower:
      return "power";
    case Method::kPowerNs:
      return "power-ns";
  }
  return "unknown";
}

absl::StatusOr<Method> ParseMethod(absl::string_view name) {
  std::string key = absl::AsciiStrToLower(absl::StripAsciiWhitespace(name));
  for (Method m : kAllMethods) {
    if (MethodName(m) == key) return m;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown method '", name, "'"));
}

absl::StatusOr<std::vector<Method>> ParseMethodList(absl::string_view list) {
  if (absl::StripAsciiWhitespace(list) == "all") {
    return std::vector<Method>(kAllMethods.begin(), kAllMethods.end());
  }
  if (absl::StripAsciiWhitespace(list).empty()) {
    return absl::InvalidArgumentError("empty method list");
  }
  std::vector<Method> methods;
  for (absl::string_view part : absl::StrSplit(list, ',')) {
    if (absl::StripAsciiWhitespace(part).empty()) {
      return absl::InvalidArgumentError("empty entry in method list");
    }
    absl::StatusOr<Method> m = ParseMethod(part);
    if (!m.ok()) return m.status();
    if (std::find(methods.begin(), methods.end(), *m) != methods.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("method '", MethodName(*m), "' listed twice"));
    }
    methods.push_back(*m);
  }
  return methods;
}

}  // namespace ldpfo
