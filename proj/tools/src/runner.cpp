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

#include "fbtur/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <thread>

#include <json.hpp>

#include "fbtur/dynamics.hpp"
#include "fbtur/model_io.hpp"
#include "fbtur/trajectories.hpp"

namespace fbtur::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kZThreshold = 3.0;

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

fs::path output_dir(const RunConfig& c) {
  fs::path dir(c.output.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("field 'output.dir': cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

std::string check_cell(const ReportCheck& c) {
  if (!c.applicable) return "";
  return c.passed ? "1" : "0";
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& c : check_report(ThermoReport{})) out.push_back(c.name);
    out.push_back("stationary_sigma_dot");
    return out;
  }();
  return names;
}

nlohmann::ordered_json rates_json(const thermo::RateBundle& r) {
  return {{"sigma_rate_total", r.sigma_dot}, {"s_tot_rate", r.s_sys_rate + r.s_env_rate},
          {"s_env_rate", r.s_env_rate},      {"s_sys_rate", r.s_sys_rate},
          {"mi_rate", r.mi_rate},            {"neg_mi_rate", -r.mi_rate},
          {"j_rate", r.j_rate},              {"sigma_rate", r.sigma_rate},
          {"activity_rate", r.activity_rate}, {"fisher_rate", r.fisher_rate}};
}

void write_samples(const fs::path& path, const std::vector<TimeSample>& samples) {
  std::ofstream out = open_output(path);
  out << io::csv_line({"t", "tr_rho", "S_sys", "rate_env", "rate_mi", "rate_sigma", "rate_activity",
                       "j_mean_rate"});
  for (const auto& s : samples) {
    out << io::csv_line({io::format_double(s.t), io::format_double(s.tr_rho), io::format_double(s.s_sys),
                         io::format_double(s.rate_env), io::format_double(s.rate_mi),
                         io::format_double(s.rate_sigma), io::format_double(s.rate_activity),
                         io::format_double(s.j_mean_rate)});
  }
}

// Model construction problems are configuration errors outside of a sweep.
ModelSpec build_checked(const RunConfig& c) {
  try {
    ModelSpec spec = build_model(c);
    require_valid(spec);
    return spec;
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("model parameters: ") + e.what());
  } catch (const InvalidModel& e) {
    throw ConfigError(std::string("model: ") + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(std::string("field 'model_file': ") + e.what());
  }
}

int run_single(const RunConfig& c, std::ostream& log) {
  build_checked(c);
  std::vector<TimeSample> samples;
  const PointResult r = evaluate_point(c, c.output.timeseries ? &samples : nullptr);
  if (!r.ok) {
    log << "numerical failure: " << r.error << "\n";
    return kNumericalFailure;
  }
  const fs::path dir = output_dir(c);
  if (c.output.csv) {
    std::ofstream out = open_output(dir / "result.csv");
    out << io::csv_line(result_columns()) << io::csv_line(result_row("", std::nullopt, r));
  }
  if (c.output.json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::parse(io::report_to_json(r.report));
    j["stationary"] = rates_json(r.stationary_rates);
    std::ofstream out = open_output(dir / "report.json");
    out << j.dump(2) << "\n";
  }
  if (c.output.timeseries) write_samples(dir / "timeseries.csv", samples);
  log << "J mean " << io::format_double(r.report.j_mean) << ", var " << io::format_double(r.report.j_var)
      << ", Sigma " << io::format_double(r.report.big_sigma) << "\n";
  for (const auto& chk : r.checks) {
    if (chk.applicable && !chk.passed) log << "violated: " << chk.name << " (margin " << chk.margin << ")\n";
  }
  return r.violates() ? kInvariantViolation : kSuccess;
}

int run_sweep(const RunConfig& c, std::ostream& log) {
  build_checked(c);
  const auto n = static_cast<std::size_t>(c.sweep.n_points);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = c.sweep.start + (c.sweep.stop - c.sweep.start) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  std::vector<PointResult> results(n);
  parallel_for(n, c.threads, [&](std::size_t i) {
    try {
      results[i] = evaluate_point(with_parameter(c, c.sweep.param, values[i]));
    } catch (const std::exception& e) {
      results[i] = PointResult{};
      results[i].error = e.what();
    }
  });

  std::size_t failed = 0;
  std::size_t violating = 0;
  for (const auto& r : results) {
    failed += r.ok ? 0 : 1;
    violating += r.violates() ? 1 : 0;
  }
  const fs::path dir = output_dir(c);
  if (c.output.csv) {
    std::ofstream out = open_output(dir / "sweep.csv");
    out << io::csv_line(result_columns());
    for (std::size_t i = 0; i < n; ++i) out << io::csv_line(result_row(c.sweep.param, values[i], results[i]));
  }
  if (c.output.json) {
    nlohmann::ordered_json j;
    j["param"] = c.sweep.param;
    j["n_points"] = n;
    j["failed_points"] = failed;
    j["violating_points"] = violating;
    std::ofstream out = open_output(dir / "sweep.json");
    out << j.dump(2) << "\n";
  }
  log << "sweep over " << c.sweep.param << ": " << n << " points, " << failed << " failed, " << violating
      << " with violations\n";
  if (violating) return kInvariantViolation;
  return failed ? kNumericalFailure : kSuccess;
}

int run_mc(const RunConfig& c, std::ostream& log) {
  ModelSpec spec = build_checked(c);
  const superop::GeneratorSet gens = superop::build_generators(spec);
  if (c.initial_state == InitialState::steady) spec.initial_state = steady_state(gens);
  const PropagationState s = propagate(spec, gens, spec.initial_state, c.tau, c.integrator);
  const ThermoReport fcs = assemble_report(s, c.tau, thermo::von_neumann_entropy(spec.initial_state),
                                           thermo::von_neumann_entropy(s.rho));
  const double dt = c.mc.dt > 0.0 ? c.mc.dt : default_trajectory_dt(spec);
  std::vector<TrajectoryRecord> records;
  EnsembleOptions opts;
  opts.threads = c.threads;
  opts.records = c.output.trajectories ? &records : nullptr;
  const EnsembleStats mc = run_ensemble(spec, c.tau, dt, c.mc.n_traj, c.mc.base_seed, opts);

  struct Row {
    const char* name;
    double fcs;
    double mc;
    double se;
  };
  const Row rows[] = {{"mean_J", fcs.j_mean, mc.mean_J, mc.se_mean},
                      {"var_J", fcs.j_var, mc.var_J, mc.se_var},
                      {"activity", fcs.activity, mc.mean_jumps, mc.se_jumps}};
  bool ok = true;
  const fs::path dir = output_dir(c);
  nlohmann::ordered_json j;
  j["n_traj"] = mc.n_traj;
  j["dt"] = dt;
  j["base_seed"] = c.mc.base_seed;
  j["coarse_step"] = mc.coarse_step;
  std::string table = io::csv_line({"quantity", "fcs", "mc", "se", "z"});
  for (const auto& r : rows) {
    const double z = r.se > 0.0 ? (r.mc - r.fcs) / r.se : (r.mc == r.fcs ? 0.0 : INFINITY);
    // The activity row documents the first-order bias of the jump scheme and is not gated.
    if (std::string(r.name) != "activity") ok = ok && std::abs(z) <= kZThreshold;
    table += io::csv_line({r.name, io::format_double(r.fcs), io::format_double(r.mc), io::format_double(r.se),
                           io::format_double(z)});
    j[r.name] = {{"fcs", r.fcs}, {"mc", r.mc}, {"se", r.se}, {"z", z}};
    log << r.name << ": fcs " << io::format_double(r.fcs) << ", mc " << io::format_double(r.mc) << ", z "
        << z << "\n";
  }
  j["pass"] = ok;
  if (c.output.csv) open_output(dir / "mc.csv") << table;
  if (c.output.json) open_output(dir / "mc.json") << j.dump(2) << "\n";
  if (c.output.trajectories) {
    std::ofstream out = open_output(dir / "trajectories.csv");
    write_trajectories_csv(out, records);
  }
  return ok ? kSuccess : kInvariantViolation;
}

struct FuzzRow {
  std::uint64_t seed = 0;
  int dim = 0;
  int n_pairs = 0;
  PointResult point;
  thermo::SecondLawComparison comparison;
  bool comparison_ok = true;
};

int run_fuzz(const RunConfig& c, std::ostream& log) {
  const auto n = static_cast<std::size_t>(c.fuzz.n_models);
  std::vector<FuzzRow> rows(n);
  parallel_for(n, c.threads, [&](std::size_t i) {
    FuzzRow& row = rows[i];
    row.seed = c.fuzz.base_seed + i;
    std::mt19937_64 pick(row.seed);
    row.dim = std::uniform_int_distribution<int>(c.fuzz.dim_min, c.fuzz.dim_max)(pick);
    row.n_pairs = std::uniform_int_distribution<int>(c.fuzz.n_pairs_min, c.fuzz.n_pairs_max)(pick);
    RunConfig point = c;
    point.model = ModelKind::random;
    point.random.dim = row.dim;
    point.random.n_pairs = row.n_pairs;
    point.random.seed = row.seed;
    point.random.feedback = c.fuzz.feedback;
    try {
      row.point = evaluate_point(point);
      const ModelSpec spec = build_model(point);
      row.comparison = thermo::second_law_comparison(spec, spec.initial_state, c.fuzz.comparison_dt);
      row.comparison_ok = row.comparison.ours <= row.comparison.prior + 1e-10 && row.comparison.ours >= -1e-10 &&
                          row.comparison.prior >= -1e-10;
    } catch (const std::exception& e) {
      row.point.ok = false;
      row.point.error = e.what();
    }
  });

  std::size_t failed = 0;
  std::size_t violations = 0;
  for (const auto& r : rows) {
    failed += r.point.ok ? 0 : 1;
    violations += (r.point.violates() || !r.comparison_ok) ? 1 : 0;
  }
  const fs::path dir = output_dir(c);
  if (c.output.csv) {
    std::ofstream out = open_output(dir / "fuzz.csv");
    std::vector<std::string> header{"seed", "dim", "n_pairs", "second_law_step_ours", "second_law_step_prior",
                                    "check_second_law_step"};
    const auto& base = result_columns();
    header.insert(header.end(), base.begin() + 2, base.end());
    out << io::csv_line(header);
    for (const auto& r : rows) {
      std::vector<std::string> cells{std::to_string(r.seed), std::to_string(r.dim), std::to_string(r.n_pairs),
                                     io::format_double(r.comparison.ours), io::format_double(r.comparison.prior),
                                     r.point.ok ? (r.comparison_ok ? "1" : "0") : ""};
      const auto tail = result_row("", std::nullopt, r.point);
      cells.insert(cells.end(), tail.begin() + 2, tail.end());
      out << io::csv_line(cells);
    }
  }
  if (c.output.json) {
    nlohmann::ordered_json j;
    j["seeds_tested"] = n;
    j["failed"] = failed;
    j["violations"] = violations;
    open_output(dir / "fuzz.json") << j.dump(2) << "\n";
  }
  log << "fuzz: " << n << " seeds tested, " << violations << " violations, " << failed << " failed\n";
  if (violations) return kInvariantViolation;
  return failed ? kNumericalFailure : kSuccess;
}

}  // namespace

bool PointResult::violates() const {
  if (!ok) return false;
  for (const auto& c : checks) {
    if (c.applicable && !c.passed) return true;
  }
  return false;
}

PointResult evaluate_point(const RunConfig& c, std::vector<TimeSample>* samples) {
  PointResult out;
  try {
    ModelSpec spec = build_model(c);
    require_valid(spec);
    const superop::GeneratorSet gens = superop::build_generators(spec);
    const CMatrix stationary = steady_state(gens);
    if (c.initial_state == InitialState::steady) spec.initial_state = stationary;
    PropagationOptions opts;
    opts.samples = samples;
    opts.sample_every = samples ? static_cast<std::size_t>(c.output.timeseries_every) : 0;
    const PropagationState s = propagate(spec, gens, spec.initial_state, c.tau, c.integrator, opts);
    out.report = assemble_report(s, c.tau, thermo::von_neumann_entropy(spec.initial_state),
                                 thermo::von_neumann_entropy(s.rho));
    out.stationary_rates = instantaneous_rates(spec, gens, stationary, CMatrix::Zero(spec.dim, spec.dim));
    out.checks = check_report(out.report);
    ReportCheck stationary_check;
    stationary_check.name = "stationary_sigma_dot";
    stationary_check.applicable = true;
    stationary_check.margin = out.stationary_rates.sigma_dot;
    stationary_check.passed = stationary_check.margin >= -kReportTolerance;
    out.checks.push_back(stationary_check);
    out.ok = true;
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

const std::vector<std::string>& result_columns() {
  static const std::vector<std::string> columns = [] {
    std::vector<std::string> out{"param", "value", "status", "error"};
    const auto& report = io::report_columns();
    out.insert(out.end(), report.begin(), report.end());
    for (const char* name : {"sigma_rate_total", "s_tot_rate", "s_env_rate", "s_sys_rate", "mi_rate", "neg_mi_rate",
                             "j_rate", "sigma_rate", "activity_rate", "fisher_rate"}) {
      out.emplace_back(name);
    }
    for (const auto& name : check_names()) out.push_back("check_" + name);
    return out;
  }();
  return columns;
}

std::vector<std::string> result_row(const std::string& param, const std::optional<double>& value,
                                    const PointResult& r) {
  std::vector<std::string> row{param, io::format_optional(value), r.ok ? "ok" : "failed", r.error};
  if (!r.ok) {
    row.resize(result_columns().size());
    return row;
  }
  const auto report = io::report_values(r.report);
  row.insert(row.end(), report.begin(), report.end());
  const auto& s = r.stationary_rates;
  for (double v : {s.sigma_dot, s.s_sys_rate + s.s_env_rate, s.s_env_rate, s.s_sys_rate, s.mi_rate, -s.mi_rate,
                   s.j_rate, s.sigma_rate, s.activity_rate, s.fisher_rate}) {
    row.push_back(io::format_double(v));
  }
  for (const auto& c : r.checks) row.push_back(check_cell(c));
  return row;
}

int run(const RunConfig& c, std::ostream& log) {
  switch (c.mode) {
    case Mode::single: return run_single(c, log);
    case Mode::sweep: return run_sweep(c, log);
    case Mode::mc_validate: return run_mc(c, log);
    case Mode::fuzz: return run_fuzz(c, log);
  }
  return kConfigFailure;
}

}  // namespace fbtur::cli
