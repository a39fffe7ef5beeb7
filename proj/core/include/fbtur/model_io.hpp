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

#include <filesystem>
#include <string>
#include <string_view>

#include "fbtur/model.hpp"

namespace fbtur::io {

/// Model file (JSON). Complex matrices are lists of rows, each row a list of
/// [re, im] pairs. See docs/model_format.md.
///
///   {
///     "dim": 2,
///     "hamiltonian": [[[0,0],[0,0]], [[0,0],[1,0]]],
///     "channels": [{"k": 0, "pair": 1, "delta_s": 1.0, "weight": 1.0, "L": ...}, ...],
///     "feedback": [{"k": 0, "kind": "identity", "kraus": [ ... ]}, ...],
///     "initial_state": ...
///   }
///
/// Parsing does not validate the physics; call validate() on the result.
ModelSpec model_from_json(std::string_view text);
std::string model_to_json(const ModelSpec& spec, int indent = 2);

ModelSpec load_model(const std::filesystem::path& path);
void save_model(const ModelSpec& spec, const std::filesystem::path& path);

}  // namespace fbtur::io
