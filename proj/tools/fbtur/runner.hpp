// Copyright 2026 The fbtur Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fbtur/config.hpp"
#include "fbtur/report.hpp"
#include "fbtur/thermo.hpp"

namespace fbtur::cli {

enum ExitCode : int { kSuccess = 0, kConfigFailure = 2, kNumericalFailure = 3, kInvariantViolation = 4 };

/// One evaluated parameter point: the finite-time report plus pointwise rates at the stationary state.
struct PointResult {
  bool ok = false;
  std::string error;
  ThermoReport report;
  thermo::RateBundle stationary_rates;
  std::vector<ReportCheck> checks;

  bool violates() const;
};

PointResult evaluate_point(const RunConfig& c, std::vector<TimeSample>* samples = nullptr);

/// Column set shared by the single and sweep outputs.
const std::vector<std::string>& result_columns();
std::vector<std::string> result_row(const std::string& param, const std::optional<double>& value,
                                    const PointResult& r);

/// Runs the configured mode, writes artifacts under c.output.dir and returns the exit code.
int run(const RunConfig& c, std::ostream& log);

}  // namespace fbtur::cli
