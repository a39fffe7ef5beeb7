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

#include "fbtur/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fbtur/errors.hpp"

namespace fbtur::io {

namespace {

using nlohmann::json;

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j, Eigen::Index dim, const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim) {
    throw FormatError(where + ": expected " + std::to_string(dim) + " rows");
  }
  CMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      throw FormatError(where + ": row " + std::to_string(i) + " must have " + std::to_string(dim) +
                        " entries");
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      const json& entry = row[c];
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
        throw FormatError(where + ": entry (" + std::to_string(i) + "," + std::to_string(c) +
                          ") must be [re, im]");
      }
      m(i, c) = cplx(entry[0].get<double>(), entry[1].get<double>());
    }
  }
  return m;
}

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(where + ": missing field '" + key + "'");
  return *it;
}

template <typename T>
T number(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) throw FormatError(where + ": field '" + key + "' must be a number");
  return v.get<T>();
}

}  // namespace

ModelSpec model_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("model file: top level must be an object");

  ModelSpec spec;
  spec.dim = number<Eigen::Index>(doc, "dim", "model");
  if (spec.dim <= 0) throw FormatError("model: dim must be positive");
  spec.hamiltonian = matrix_from_json(field(doc, "hamiltonian", "model"), spec.dim, "hamiltonian");
  spec.initial_state = matrix_from_json(field(doc, "initial_state", "model"), spec.dim, "initial_state");

  const json& channels = field(doc, "channels", "model");
  if (!channels.is_array()) throw FormatError("model: channels must be a list");
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::string where = "channels[" + std::to_string(i) + "]";
    const json& c = channels[i];
    JumpChannel ch;
    ch.index = number<int>(c, "k", where);
    ch.pair = number<int>(c, "pair", where);
    ch.delta_s = number<double>(c, "delta_s", where);
    ch.weight = number<double>(c, "weight", where);
    ch.op = matrix_from_json(field(c, "L", where), spec.dim, where + ".L");
    spec.channels.push_back(std::move(ch));
  }

  const json& feedback = field(doc, "feedback", "model");
  if (!feedback.is_array()) throw FormatError("model: feedback must be a list");
  for (std::size_t i = 0; i < feedback.size(); ++i) {
    const std::string where = "feedback[" + std::to_string(i) + "]";
    const json& f = feedback[i];
    const int k = number<int>(f, "k", where);
    const json& kind = field(f, "kind", where);
    if (!kind.is_string()) throw FormatError(where + ": kind must be a string");
    FeedbackChannel fb;
    try {
      fb.kind = feedback_kind_from_string(kind.get<std::string>());
    } catch (const InvalidParameter& e) {
      throw FormatError(where + ": " + e.what());
    }
    const json& kraus = field(f, "kraus", where);
    if (!kraus.is_array()) throw FormatError(where + ": kraus must be a list of matrices");
    for (std::size_t a = 0; a < kraus.size(); ++a) {
      fb.kraus.push_back(
          matrix_from_json(kraus[a], spec.dim, where + ".kraus[" + std::to_string(a) + "]"));
    }
    if (!spec.feedback.emplace(k, std::move(fb)).second) {
      throw FormatError(where + ": duplicate feedback entry for channel " + std::to_string(k));
    }
  }
  return spec;
}

std::string model_to_json(const ModelSpec& spec, int indent) {
  json doc;
  doc["dim"] = spec.dim;
  doc["hamiltonian"] = matrix_to_json(spec.hamiltonian);
  json channels = json::array();
  for (const auto& ch : spec.channels) {
    channels.push_back({{"k", ch.index},
                        {"pair", ch.pair},
                        {"delta_s", ch.delta_s},
                        {"weight", ch.weight},
                        {"L", matrix_to_json(ch.op)}});
  }
  doc["channels"] = std::move(channels);
  json feedback = json::array();
  for (const auto& [k, fb] : spec.feedback) {
    json kraus = json::array();
    for (const auto& op : fb.kraus) kraus.push_back(matrix_to_json(op));
    feedback.push_back({{"k", k}, {"kind", std::string(to_string(fb.kind))}, {"kraus", std::move(kraus)}});
  }
  doc["feedback"] = std::move(feedback);
  doc["initial_state"] = matrix_to_json(spec.initial_state);
  return doc.dump(indent);
}

ModelSpec load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

void save_model(const ModelSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write model file " + path.string());
  out << model_to_json(spec) << '\n';
}

}  // namespace fbtur::io
