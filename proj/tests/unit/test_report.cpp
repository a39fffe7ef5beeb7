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

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include <json.hpp>

#include "fbtur/dynamics.hpp"
#include "fbtur/models.hpp"
#include "fbtur/report.hpp"
#include "fbtur/thermo.hpp"

namespace fbtur {
namespace {

IntegratorConfig step(double h) {
  IntegratorConfig cfg;
  cfg.h = h;
  return cfg;
}

const ReportCheck& check_named(const std::vector<ReportCheck>& checks, const std::string& name) {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::runtime_error("no check " + name);
}

TEST(Report, ZeroMeanCurrentLeavesBoundsUndefined) {
  const ThermoReport r = compute_report(thermal_qubit(1.0, 1.0, 1.0), 2.0, step(1e-3));
  EXPECT_TRUE(r.zero_mean_current());
  EXPECT_FALSE(r.var_over_mean_sq);
  EXPECT_FALSE(r.tur_rhs_main);
  EXPECT_FALSE(r.tur_rhs_tight);
  EXPECT_FALSE(r.cramer_rao_rhs);
  const auto checks = check_report(r);
  EXPECT_FALSE(check_named(checks, "tur_main").applicable);
  EXPECT_TRUE(check_named(checks, "second_law").applicable);
  EXPECT_TRUE(all_checks_pass(checks));
}

TEST(Report, ClockSatisfiesEveryBound) {
  ModelSpec spec = models::build_clock({});
  spec.initial_state = steady_state(spec);
  const ThermoReport r = compute_report(spec, 1.0, step(1e-3));
  ASSERT_TRUE(r.delta_j && r.tur_rhs_main && r.tur_rhs_tight && r.cramer_rao_rhs && r.fisher_bound);
  EXPECT_NEAR(*r.var_over_mean_sq, r.j_var / (r.j_mean * r.j_mean), 1e-14);
  EXPECT_NEAR(*r.tur_rhs_main, 2.0 * std::pow(1.0 + *r.delta_j, 2) / r.big_sigma, 1e-12);
  const double x = r.big_sigma / (2.0 * r.activity);
  const double tight = std::pow(1.0 + *r.delta_j, 2) * 4.0 * r.activity / (r.big_sigma * r.big_sigma) *
                       std::pow(thermo::phi_fn(x), 2);
  EXPECT_NEAR(*r.tur_rhs_tight, tight, 1e-10 * tight);
  EXPECT_NEAR(*r.fisher_bound,
              r.big_sigma * r.big_sigma / (4.0 * r.activity) / std::pow(thermo::phi_fn(x), 2),
              1e-10 * *r.fisher_bound);
  const auto checks = check_report(r);
  for (const auto& c : checks) {
    EXPECT_TRUE(c.applicable) << c.name;
    EXPECT_TRUE(c.passed) << c.name << " margin " << c.margin;
  }
  EXPECT_GE(*r.var_over_mean_sq, *r.tur_rhs_tight);
  EXPECT_GE(*r.tur_rhs_tight, *r.tur_rhs_main - 1e-8);
}

TEST(Report, ViolationIsDetected) {
  ThermoReport r;
  r.big_sigma = -1e-3;
  const auto checks = check_report(r);
  EXPECT_FALSE(check_named(checks, "second_law").passed);
  EXPECT_NEAR(check_named(checks, "second_law").margin, -1e-3, 1e-15);
  EXPECT_FALSE(all_checks_pass(checks));
  r.big_sigma = -1e-9;
  EXPECT_TRUE(check_named(check_report(r), "second_law").passed);
}

TEST(ReportIo, ValuesMatchColumns) {
  const ThermoReport r = compute_report(models::build_clock({}), 0.5, step(1e-3));
  EXPECT_EQ(io::report_values(r).size(), io::report_columns().size());
  const auto doc = nlohmann::json::parse(io::report_to_json(r));
  EXPECT_DOUBLE_EQ(doc.at("j_mean").get<double>(), r.j_mean);
  EXPECT_TRUE(doc.contains("check_second_law"));
  const ThermoReport eq = compute_report(thermal_qubit(1.0, 1.0, 1.0), 0.5, step(1e-3));
  EXPECT_TRUE(nlohmann::json::parse(io::report_to_json(eq)).at("delta_j").is_null());
}

TEST(ReportIo, NumberFormatting) {
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(io::format_double(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(io::format_optional(std::nullopt), "");
  EXPECT_EQ(io::csv_escape("plain"), "plain");
  EXPECT_EQ(io::csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(io::csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(io::csv_line({"a", "b,c"}), "a,\"b,c\"\r\n");
}

}  // namespace
}  // namespace fbtur
