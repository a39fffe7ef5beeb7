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

#include <cstdio>

#include <json.hpp>

#include "fbtur/report.hpp"

namespace fbtur::io {

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> columns{
      "tau",           "j_mean",         "j_var",          "var_over_mean_sq", "delta_j",
      "j_phi",         "s_sys",          "s_sys_integral", "s_env",            "s_tot",
      "mutual_info",   "big_sigma",      "sigma_integral", "activity",         "fisher",
      "min_sigma_dot", "min_sigma_rate", "min_sigma_gap", "tur_rhs_main",   "tur_rhs_tight",    "cramer_rao_rhs",
      "fisher_bound",  "zero_mean_current"};
  return columns;
}

std::vector<std::string> report_values(const ThermoReport& r) {
  return {format_double(r.tau),           format_double(r.j_mean),         format_double(r.j_var),
          format_optional(r.var_over_mean_sq), format_optional(r.delta_j), format_double(r.j_phi),
          format_double(r.s_sys),         format_double(r.s_sys_integral), format_double(r.s_env),
          format_double(r.s_tot),         format_double(r.mutual_info),    format_double(r.big_sigma),
          format_double(r.sigma_integral), format_double(r.activity),      format_double(r.fisher),
          format_double(r.min_sigma_dot), format_double(r.min_sigma_rate), format_double(r.min_sigma_gap), format_optional(r.tur_rhs_main),
          format_optional(r.tur_rhs_tight), format_optional(r.cramer_rao_rhs), format_optional(r.fisher_bound),
          r.zero_mean_current() ? "1" : "0"};
}

std::string report_to_json(const ThermoReport& r, int indent) {
  nlohmann::ordered_json j;
  j["tau"] = r.tau;
  j["j_mean"] = r.j_mean;
  j["j_var"] = r.j_var;
  j["var_over_mean_sq"] = optional_json(r.var_over_mean_sq);
  j["delta_j"] = optional_json(r.delta_j);
  j["j_phi"] = r.j_phi;
  j["s_sys"] = r.s_sys;
  j["s_sys_integral"] = r.s_sys_integral;
  j["s_env"] = r.s_env;
  j["s_tot"] = r.s_tot;
  j["mutual_info"] = r.mutual_info;
  j["big_sigma"] = r.big_sigma;
  j["sigma_integral"] = r.sigma_integral;
  j["activity"] = r.activity;
  j["fisher"] = r.fisher;
  j["min_sigma_dot"] = r.min_sigma_dot;
  j["min_sigma_rate"] = r.min_sigma_rate;
  j["min_sigma_gap"] = r.min_sigma_gap;
  j["tur_rhs_main"] = optional_json(r.tur_rhs_main);
  j["tur_rhs_tight"] = optional_json(r.tur_rhs_tight);
  j["cramer_rao_rhs"] = optional_json(r.cramer_rao_rhs);
  j["fisher_bound"] = optional_json(r.fisher_bound);
  j["zero_mean_current"] = r.zero_mean_current();
  for (const auto& c : check_report(r)) {
    j["check_" + c.name] = c.applicable ? nlohmann::json(c.passed) : nlohmann::json(nullptr);
  }
  return j.dump(indent);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(fields[i]);
  }
  out += "\r\n";
  return out;
}

}  // namespace fbtur::io
