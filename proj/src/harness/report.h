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

#ifndef LDPFO_HARNESS_REPORT_H_
#define LDPFO_HARNESS_REPORT_H_

#include <string>

#include "harness/experiment.h"

namespace ldpfo {

// `method,metric,param,value,std` with a header row. Numbers are printed
// with 17 significant digits, so equal results give identical bytes.
std::string FormatCsv(const ExperimentResult& result);

// The whole result, including the config echo, metadata, per-method timings
// and any per-value bias/variance vectors.
std::string FormatJson(const ExperimentResult& result);

}  // namespace ldpfo

#endif  // LDPFO_HARNESS_REPORT_H_
