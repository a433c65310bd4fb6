// Copyright 2026 The machop Authors.
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

// JSON encodings shared by session records, the HTTP service and the CLI.

#ifndef MACHOP_JSON_IO_HPP_
#define MACHOP_JSON_IO_HPP_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "machop/elicit.hpp"

namespace machop {

// {"var": v, "value": x}. Decoded facts carry no literal unless a model is given.
nlohmann::json to_json(const Fact& f);
Fact fact_from_json(const nlohmann::json& j, const ClausalCSP* csp = nullptr);

// {"target", "facts", "groups": [{"id", "category"}], "features"}.
nlohmann::json to_json(const ExplanationStep& step, const ClausalCSP* csp = nullptr);
ExplanationStep step_from_json(const nlohmann::json& j, const ClausalCSP* csp = nullptr);

nlohmann::json to_json(const ElicitConfig& cfg);
// Starts from the strategy preset; "eta" defaults to the tuned rate for the
// resulting configuration. Throws std::invalid_argument on bad values.
ElicitConfig elicit_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NormState& n);
NormState norm_from_json(const nlohmann::json& j);

nlohmann::json to_json(const IterationLog& log, const ClausalCSP* csp = nullptr);
IterationLog iteration_from_json(const nlohmann::json& j);

// Human-facing rendering of a step: grid state, used facts and constraints,
// the derived fact and named features.
nlohmann::json render_step(const ExplanationStep& step, const ClausalCSP& csp,
                           const std::vector<Fact>& given);

struct WeightFile {
  std::vector<double> weights;
  std::vector<double> ub;  // empty = raw scale
};

// Accepts a bare array or {"weights": [...], "ub": [...]}; a session record
// (JSON lines) yields its final snapshot.
WeightFile read_weight_file(const std::string& path);

}  // namespace machop

#endif  // MACHOP_JSON_IO_HPP_
