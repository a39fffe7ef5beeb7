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

#include "fbtur/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fbtur/model_io.hpp"

namespace fbtur::cli {

namespace {

using nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so leftovers can be rejected.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  double number(const std::string& key, double fallback) {
    if (!take(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number()) fail(key, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }

  long long integer(const std::string& key, long long fallback) {
    if (!take(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_integer()) fail(key, "must be an integer");
    return v.get<long long>();
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    if (!take(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_number_unsigned()) fail(key, "must be a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!take(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) fail(key, "must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!take(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }

  const json* child(const std::string& key) {
    if (!take(key)) return nullptr;
    return &node_.at(key);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? (path_.empty() ? std::string("config") : path_) : field(key);
    throw ConfigError("field '" + where + "': " + what);
  }

  void reject_unknown() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!used_.count(it.key())) fail(it.key(), "unknown key");
    }
  }

 private:
  bool take(const std::string& key) {
    if (!node_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  const json& node_;
  std::string path_;
  std::set<std::string> used_;
};

template <class E>
struct Named {
  const char* name;
  E value;
};

constexpr Named<Mode> kModes[] = {
    {"single", Mode::single}, {"sweep", Mode::sweep}, {"mc_validate", Mode::mc_validate}, {"fuzz", Mode::fuzz}};
constexpr Named<ModelKind> kModels[] = {{"clock", ModelKind::clock},
                                        {"thermal_qubit", ModelKind::thermal_qubit},
                                        {"random", ModelKind::random},
                                        {"file", ModelKind::file}};
constexpr Named<InitialState> kInitial[] = {{"steady", InitialState::steady}, {"model", InitialState::model}};

template <class E, std::size_t N>
E lookup(Section& s, const std::string& key, const Named<E> (&table)[N], E fallback) {
  const std::string v = s.text(key, "");
  if (v.empty() && !s.has(key)) return fallback;
  for (const auto& n : table) {
    if (v == n.name) return n.value;
  }
  std::string options;
  for (const auto& n : table) options += std::string(options.empty() ? "" : ", ") + n.name;
  s.fail(key, "'" + v + "' is not one of " + options);
}

template <class E, std::size_t N>
std::string name_of(E value, const Named<E> (&table)[N]) {
  for (const auto& n : table) {
    if (n.value == value) return n.name;
  }
  return "unknown";
}

int as_int(Section& s, const std::string& key, long long v, long long lo, long long hi) {
  if (v < lo || v > hi) {
    s.fail(key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

void positive(Section& s, const std::string& key, double v) {
  if (!(v > 0.0)) s.fail(key, "must be positive");
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

void read_model_params(Section& top, RunConfig& c) {
  switch (c.model) {
    case ModelKind::clock: {
      auto& p = c.clock;
      p.E0 = top.number("E0", p.E0);
      p.E1 = top.number("E1", p.E1);
      p.E2 = top.number("E2", p.E2);
      p.beta = top.number("beta", p.beta);
      p.gamma_1to0 = top.number("gamma_1to0", p.gamma_1to0);
      p.gamma_2to1 = top.number("gamma_2to1", p.gamma_2to1);
      p.gamma_2to0 = top.number("gamma_2to0", p.gamma_2to0);
      p.feedback_on = top.boolean("feedback_on", p.feedback_on);
      positive(top, "beta", p.beta);
      positive(top, "gamma_1to0", p.gamma_1to0);
      positive(top, "gamma_2to1", p.gamma_2to1);
      positive(top, "gamma_2to0", p.gamma_2to0);
      break;
    }
    case ModelKind::thermal_qubit: {
      auto& p = c.thermal;
      p.beta = top.number("beta", p.beta);
      p.energy_gap = top.number("energy_gap", p.energy_gap);
      p.gamma_down = top.number("gamma_down", p.gamma_down);
      positive(top, "beta", p.beta);
      positive(top, "gamma_down", p.gamma_down);
      break;
    }
    case ModelKind::random: {
      auto& p = c.random;
      p.dim = as_int(top, "dim", top.integer("dim", p.dim), 2, 16);
      p.n_pairs = as_int(top, "n_pairs", top.integer("n_pairs", p.n_pairs), 1, 64);
      p.seed = top.seed("seed", p.seed);
      p.delta_s_range = top.number("delta_s_range", p.delta_s_range);
      if (p.delta_s_range < 0.0) top.fail("delta_s_range", "must be nonnegative");
      const std::string kind = top.text("feedback_kind", std::string(models::to_string(p.feedback)));
      try {
        p.feedback = models::random_feedback_from_string(kind);
      } catch (const InvalidParameter&) {
        top.fail("feedback_kind", "'" + kind + "' is not one of identity, unitary, general_unital, mixed");
      }
      break;
    }
    case ModelKind::file:
      c.model_file = top.text("model_file", "");
      if (c.model_file.empty()) top.fail("model_file", "is required for model 'file'");
      break;
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  RunConfig c;
  Section top(root, "");
  c.mode = lookup(top, "mode", kModes, Mode::single);
  c.model = lookup(top, "model", kModels, ModelKind::clock);
  c.initial_state =
      lookup(top, "initial_state", kInitial, c.mode == Mode::fuzz ? InitialState::model : InitialState::steady);
  c.tau = top.number("tau", c.tau);
  positive(top, "tau", c.tau);
  c.threads = static_cast<unsigned>(as_int(top, "threads", top.integer("threads", 0), 0, 1024));
  read_model_params(top, c);

  c.integrator.h = 1e-3 * c.tau;
  if (const json* node = top.child("integrator")) {
    Section s(*node, "integrator");
    const std::string method = s.text("method", std::string(to_string(c.integrator.method)));
    if (method == "rk4_fixed") {
      c.integrator.method = IntegratorMethod::rk4_fixed;
    } else if (method == "rk45_adaptive") {
      c.integrator.method = IntegratorMethod::rk45_adaptive;
    } else {
      s.fail("method", "'" + method + "' is not one of rk4_fixed, rk45_adaptive");
    }
    c.integrator.h = s.number("h", c.integrator.h);
    c.integrator.abs_tol = s.number("abs_tol", c.integrator.abs_tol);
    c.integrator.rel_tol = s.number("rel_tol", c.integrator.rel_tol);
    c.integrator.renormalize_trace = s.boolean("renormalize_trace", c.integrator.renormalize_trace);
    c.integrator.max_step_spectral = s.number("max_step_spectral", c.integrator.max_step_spectral);
    positive(s, "h", c.integrator.h);
    positive(s, "abs_tol", c.integrator.abs_tol);
    positive(s, "rel_tol", c.integrator.rel_tol);
    if (c.integrator.max_step_spectral < 0.0) s.fail("max_step_spectral", "must be nonnegative");
    s.reject_unknown();
  }
  if (c.integrator.h > c.tau) top.fail("integrator", "step h exceeds tau");

  if (const json* node = top.child("sweep")) {
    Section s(*node, "sweep");
    c.sweep.param = s.text("param", c.sweep.param);
    c.sweep.start = s.number("start", c.sweep.start);
    c.sweep.stop = s.number("stop", c.sweep.stop);
    c.sweep.n_points = as_int(s, "n_points", s.integer("n_points", c.sweep.n_points), 2, 100000);
    const auto names = sweep_parameters(c.model);
    if (std::find(names.begin(), names.end(), c.sweep.param) == names.end()) {
      s.fail("param", "'" + c.sweep.param + "' is not a parameter of model '" + name_of(c.model, kModels) + "'");
    }
    s.reject_unknown();
  } else if (c.mode == Mode::sweep) {
    const auto names = sweep_parameters(c.model);
    if (std::find(names.begin(), names.end(), c.sweep.param) == names.end()) {
      top.fail("sweep", "is required for model '" + name_of(c.model, kModels) + "'");
    }
  }

  if (const json* node = top.child("mc")) {
    Section s(*node, "mc");
    c.mc.n_traj = static_cast<long>(s.integer("n_traj", c.mc.n_traj));
    if (c.mc.n_traj < 2) s.fail("n_traj", "must be at least 2");
    c.mc.dt = s.number("dt", c.mc.dt);
    if (c.mc.dt < 0.0) s.fail("dt", "must be nonnegative");
    c.mc.base_seed = s.seed("base_seed", c.mc.base_seed);
    s.reject_unknown();
  }

  if (const json* node = top.child("fuzz")) {
    Section s(*node, "fuzz");
    auto& f = c.fuzz;
    f.n_models = as_int(s, "n_models", s.integer("n_models", f.n_models), 1, 1000000);
    f.dim_min = as_int(s, "dim_min", s.integer("dim_min", f.dim_min), 2, 16);
    f.dim_max = as_int(s, "dim_max", s.integer("dim_max", f.dim_max), 2, 16);
    f.n_pairs_min = as_int(s, "n_pairs_min", s.integer("n_pairs_min", f.n_pairs_min), 1, 64);
    f.n_pairs_max = as_int(s, "n_pairs_max", s.integer("n_pairs_max", f.n_pairs_max), 1, 64);
    if (f.dim_max < f.dim_min) s.fail("dim_max", "must not be below dim_min");
    if (f.n_pairs_max < f.n_pairs_min) s.fail("n_pairs_max", "must not be below n_pairs_min");
    const std::string kind = s.text("feedback_kind", std::string(models::to_string(f.feedback)));
    try {
      f.feedback = models::random_feedback_from_string(kind);
    } catch (const InvalidParameter&) {
      s.fail("feedback_kind", "'" + kind + "' is not one of identity, unitary, general_unital, mixed");
    }
    f.base_seed = s.seed("base_seed", f.base_seed);
    f.comparison_dt = s.number("comparison_dt", f.comparison_dt);
    positive(s, "comparison_dt", f.comparison_dt);
    s.reject_unknown();
  }

  if (const json* node = top.child("output")) {
    Section s(*node, "output");
    auto& o = c.output;
    o.dir = s.text("dir", o.dir);
    if (const json* formats = s.child("formats")) {
      if (!formats->is_array()) s.fail("formats", "must be a list");
      o.csv = o.json = false;
      for (const auto& f : *formats) {
        const std::string name = f.is_string() ? f.get<std::string>() : std::string();
        if (name == "csv") {
          o.csv = true;
        } else if (name == "json") {
          o.json = true;
        } else {
          s.fail("formats", "entries must be \"csv\" or \"json\"");
        }
      }
    }
    o.timeseries = s.boolean("timeseries", o.timeseries);
    o.timeseries_every = as_int(s, "timeseries_every", s.integer("timeseries_every", o.timeseries_every), 1,
                                1000000000);
    o.trajectories = s.boolean("trajectories", o.trajectories);
    s.reject_unknown();
  }

  top.reject_unknown();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["mode"] = name_of(c.mode, kModes);
  j["model"] = name_of(c.model, kModels);
  switch (c.model) {
    case ModelKind::clock:
      j["E0"] = c.clock.E0;
      j["E1"] = c.clock.E1;
      j["E2"] = c.clock.E2;
      j["beta"] = c.clock.beta;
      j["gamma_1to0"] = c.clock.gamma_1to0;
      j["gamma_2to1"] = c.clock.gamma_2to1;
      j["gamma_2to0"] = c.clock.gamma_2to0;
      j["feedback_on"] = c.clock.feedback_on;
      break;
    case ModelKind::thermal_qubit:
      j["beta"] = c.thermal.beta;
      j["energy_gap"] = c.thermal.energy_gap;
      j["gamma_down"] = c.thermal.gamma_down;
      break;
    case ModelKind::random:
      j["dim"] = c.random.dim;
      j["n_pairs"] = c.random.n_pairs;
      j["seed"] = c.random.seed;
      j["feedback_kind"] = std::string(models::to_string(c.random.feedback));
      j["delta_s_range"] = c.random.delta_s_range;
      break;
    case ModelKind::file:
      j["model_file"] = c.model_file;
      break;
  }
  j["tau"] = c.tau;
  j["initial_state"] = name_of(c.initial_state, kInitial);
  j["threads"] = c.threads;
  j["integrator"] = {{"method", std::string(to_string(c.integrator.method))},
                     {"h", c.integrator.h},
                     {"abs_tol", c.integrator.abs_tol},
                     {"rel_tol", c.integrator.rel_tol},
                     {"renormalize_trace", c.integrator.renormalize_trace},
                     {"max_step_spectral", c.integrator.max_step_spectral}};
  if (c.mode == Mode::sweep || c.sweep != SweepConfig{}) {
    j["sweep"] = {{"param", c.sweep.param},
                  {"start", c.sweep.start},
                  {"stop", c.sweep.stop},
                  {"n_points", c.sweep.n_points}};
  }
  j["mc"] = {{"n_traj", c.mc.n_traj}, {"dt", c.mc.dt}, {"base_seed", c.mc.base_seed}};
  j["fuzz"] = {{"n_models", c.fuzz.n_models},
               {"dim_min", c.fuzz.dim_min},
               {"dim_max", c.fuzz.dim_max},
               {"n_pairs_min", c.fuzz.n_pairs_min},
               {"n_pairs_max", c.fuzz.n_pairs_max},
               {"feedback_kind", std::string(models::to_string(c.fuzz.feedback))},
               {"base_seed", c.fuzz.base_seed},
               {"comparison_dt", c.fuzz.comparison_dt}};
  nlohmann::ordered_json formats = nlohmann::ordered_json::array();
  if (c.output.csv) formats.push_back("csv");
  if (c.output.json) formats.push_back("json");
  j["output"] = {{"dir", c.output.dir},
                 {"formats", formats},
                 {"timeseries", c.output.timeseries},
                 {"timeseries_every", c.output.timeseries_every},
                 {"trajectories", c.output.trajectories}};
  return j.dump(2) + "\n";
}

std::vector<std::string> sweep_parameters(ModelKind kind) {
  switch (kind) {
    case ModelKind::clock:
      return {"E0", "E1", "E2", "beta", "gamma_1to0", "gamma_2to1", "gamma_2to0", "tau"};
    case ModelKind::thermal_qubit:
      return {"beta", "energy_gap", "gamma_down", "tau"};
    case ModelKind::random:
      return {"delta_s_range", "tau"};
    case ModelKind::file:
      return {"tau"};
  }
  return {};
}

RunConfig with_parameter(const RunConfig& c, const std::string& name, double value) {
  RunConfig out = c;
  if (name == "tau") {
    out.tau = value;
    return out;
  }
  double* slot = nullptr;
  if (c.model == ModelKind::clock) {
    auto& p = out.clock;
    if (name == "E0") slot = &p.E0;
    if (name == "E1") slot = &p.E1;
    if (name == "E2") slot = &p.E2;
    if (name == "beta") slot = &p.beta;
    if (name == "gamma_1to0") slot = &p.gamma_1to0;
    if (name == "gamma_2to1") slot = &p.gamma_2to1;
    if (name == "gamma_2to0") slot = &p.gamma_2to0;
  } else if (c.model == ModelKind::thermal_qubit) {
    if (name == "beta") slot = &out.thermal.beta;
    if (name == "energy_gap") slot = &out.thermal.energy_gap;
    if (name == "gamma_down") slot = &out.thermal.gamma_down;
  } else if (c.model == ModelKind::random) {
    if (name == "delta_s_range") slot = &out.random.delta_s_range;
  }
  if (!slot) throw ConfigError("field 'sweep.param': '" + name + "' is not a parameter of this model");
  *slot = value;
  return out;
}

ModelSpec build_model(const RunConfig& c) {
  switch (c.model) {
    case ModelKind::clock:
      return models::build_clock(c.clock);
    case ModelKind::thermal_qubit:
      return thermal_qubit(c.thermal.beta, c.thermal.energy_gap, c.thermal.gamma_down);
    case ModelKind::random:
      return models::random_model(c.random);
    case ModelKind::file:
      return io::load_model(c.model_file);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace fbtur::cli
