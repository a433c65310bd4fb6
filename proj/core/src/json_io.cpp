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

#include "machop/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace machop {

using nlohmann::json;

json to_json(const Fact& f) { return json{{"var", f.variable}, {"value", f.value}}; }

Fact fact_from_json(const json& j, const ClausalCSP* csp) {
  const int var = j.at("var").get<int>();
  const int value = j.at("value").get<int>();
  if (csp) return csp->fact(var, value);
  Fact f;
  f.variable = var;
  f.value = value;
  return f;
}

namespace {

json facts_to_json(const std::vector<Fact>& facts) {
  json out = json::array();
  for (const Fact& f : facts) out.push_back(to_json(f));
  return out;
}

std::vector<Fact> facts_from_json(const json& j, const ClausalCSP* csp) {
  std::vector<Fact> out;
  for (const auto& f : j) out.push_back(fact_from_json(f, csp));
  return out;
}

}  // namespace

json to_json(const ExplanationStep& step, const ClausalCSP* csp) {
  json groups = json::array();
  for (int g : step.groups) {
    json e{{"id", g}};
    if (csp) e["category"] = std::string(category_name(csp->groups.at(g).category));
    groups.push_back(std::move(e));
  }
  return json{{"target", to_json(step.target)},
              {"facts", facts_to_json(step.facts)},
              {"groups", std::move(groups)},
              {"features", step.features}};
}

ExplanationStep step_from_json(const json& j, const ClausalCSP* csp) {
  ExplanationStep s;
  s.target = fact_from_json(j.at("target"), csp);
  s.facts = facts_from_json(j.at("facts"), csp);
  for (const auto& g : j.at("groups")) s.groups.push_back(g.at("id").get<int>());
  s.features = j.at("features").get<FeatureVector>();
  return s;
}

json to_json(const ElicitConfig& cfg) {
  json j{{"strategy", cfg.strategy},
         {"scheme", std::string(to_string(cfg.scheme))},
         {"nondomination", cfg.nondomination},
         {"normalization", std::string(to_string(cfg.normalization))},
         {"selection", std::string(to_string(cfg.selection))},
         {"eta", cfg.eta},
         {"iterations", cfg.iterations},
         {"seed", cfg.seed}};
  if (!cfg.initial_weights.empty()) j["initial_weights"] = cfg.initial_weights;
  return j;
}

ElicitConfig elicit_config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  try {
    ElicitConfig cfg = ElicitConfig::preset(j.value("strategy", std::string("machop")));
    if (j.contains("scheme")) cfg.scheme = parse_scheme(j.at("scheme").get<std::string>());
    if (j.contains("nondomination")) cfg.nondomination = j.at("nondomination").get<bool>();
    if (j.contains("normalization")) {
      cfg.normalization = parse_normalization(j.at("normalization").get<std::string>());
    }
    if (j.contains("selection")) {
      cfg.selection = parse_selection(j.at("selection").get<std::string>());
    }
    cfg.eta = j.contains("eta") ? j.at("eta").get<double>() : default_learning_rate(cfg);
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("initial_weights")) {
      cfg.initial_weights = j.at("initial_weights").get<std::vector<double>>();
    }
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config: ") + e.what());
  }
}

json to_json(const NormState& n) {
  return json{{"mode", std::string(to_string(n.mode))}, {"ub", n.ub}, {"lb", n.lb}};
}

NormState norm_from_json(const json& j) {
  NormState n;
  n.mode = parse_normalization(j.at("mode").get<std::string>());
  n.ub = j.at("ub").get<std::vector<double>>();
  n.lb = j.at("lb").get<std::vector<double>>();
  if (n.ub.size() != n.lb.size()) throw std::invalid_argument("bound vectors differ in length");
  return n;
}

json to_json(const IterationLog& log, const ClausalCSP* csp) {
  return json{{"t", log.t},
              {"puzzle", log.puzzle_id},
              {"given", facts_to_json(log.given)},
              {"targets", facts_to_json(log.targets)},
              {"y1", to_json(log.y1, csp)},
              {"y2", to_json(log.y2, csp)},
              {"relaxed", log.relaxed},
              {"label", std::string(to_string(log.label))},
              {"ub", log.ub},
              {"weights", log.weights}};
}

IterationLog iteration_from_json(const json& j) {
  IterationLog log;
  log.t = j.at("t").get<int>();
  log.puzzle_id = j.value("puzzle", std::string());
  log.given = facts_from_json(j.at("given"), nullptr);
  log.targets = facts_from_json(j.at("targets"), nullptr);
  log.y1 = step_from_json(j.at("y1"));
  log.y2 = step_from_json(j.at("y2"));
  log.relaxed = j.value("relaxed", false);
  log.label = parse_label(j.at("label").get<std::string>());
  log.ub = j.at("ub").get<std::vector<double>>();
  log.weights = j.at("weights").get<std::vector<double>>();
  return log;
}

namespace {

json cell_of(const ClausalCSP& csp, int decision_var) {
  if (csp.kind != PuzzleKind::kSudoku) return json{{"var", decision_var}};
  return json{{"row", decision_var / csp.size}, {"col", decision_var % csp.size}};
}

json render_fact(const ClausalCSP& csp, const Fact& f) {
  json j = cell_of(csp, f.variable);
  j["var"] = f.variable;
  j["value"] = f.value;
  j["text"] = csp.describe(f);
  return j;
}

}  // namespace

json render_step(const ExplanationStep& step, const ClausalCSP& csp,
                 const std::vector<Fact>& given) {
  json out;
  out["kind"] = csp.kind == PuzzleKind::kSudoku ? "sudoku" : "logic_grid";
  if (csp.kind == PuzzleKind::kSudoku) {
    std::vector<std::vector<int>> grid(csp.size, std::vector<int>(csp.size, 0));
    for (const Fact& f : given) grid[f.variable / csp.size][f.variable % csp.size] = f.value;
    out["size"] = csp.size;
    out["grid"] = grid;
  } else {
    json g = json::array();
    for (const Fact& f : given) g.push_back(render_fact(csp, f));
    out["known"] = std::move(g);
  }
  json used = json::array();
  for (const Fact& f : step.facts) used.push_back(render_fact(csp, f));
  out["used_facts"] = std::move(used);

  json constraints = json::array();
  for (int gid : step.groups) {
    const ConstraintGroup& g = csp.groups.at(gid);
    json c{{"id", gid}, {"name", g.name}, {"category", std::string(category_name(g.category))}};
    if (csp.kind == PuzzleKind::kSudoku) {
      std::vector<int> owners;
      for (VarId v : g.scope) owners.push_back(csp.owner(v));
      std::sort(owners.begin(), owners.end());
      owners.erase(std::unique(owners.begin(), owners.end()), owners.end());
      json cells = json::array();
      for (int d : owners) cells.push_back(cell_of(csp, d));
      c["cells"] = std::move(cells);
    }
    constraints.push_back(std::move(c));
  }
  out["constraints"] = std::move(constraints);
  out["derived"] = render_fact(csp, step.target);

  const auto& names = feature_names(csp.kind);
  json feats = json::array();
  for (std::size_t i = 0; i < step.features.size(); ++i) {
    feats.push_back(json{{"name", names.at(i)}, {"value", step.features[i]}});
  }
  out["features"] = std::move(feats);
  return out;
}

WeightFile read_weight_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  WeightFile out;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    // JSON lines: take the last record that carries weights.
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const json rec = json::parse(line);
      if (rec.contains("weights")) j = rec;
      else if (rec.contains("initial_weights") && j.is_null()) {
        j = json{{"weights", rec.at("initial_weights")}};
        if (rec.contains("norm")) j["ub"] = rec.at("norm").at("ub");
      }
    }
    if (j.is_null()) throw std::runtime_error("no weights found in " + path);
  }
  if (j.is_array()) {
    out.weights = j.get<std::vector<double>>();
  } else {
    out.weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("ub")) out.ub = j.at("ub").get<std::vector<double>>();
  }
  if (static_cast<int>(out.weights.size()) != kNumFeatures) {
    throw std::runtime_error("weight file must hold " + std::to_string(kNumFeatures) + " weights");
  }
  if (!out.ub.empty() && out.ub.size() != out.weights.size()) {
    throw std::runtime_error("weight file bounds differ in length from the weights");
  }
  return out;
}

}  // namespace machop
