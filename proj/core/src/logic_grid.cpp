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

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "machop/model.hpp"

namespace machop {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct Parser {
  std::vector<std::string> types;
  std::map<std::string, int> entity_type;  // entity -> type index
  std::vector<std::vector<std::string>> entities_by_type;
  std::map<std::pair<std::string, std::string>, VarId> var_index;
  std::shared_ptr<ClausalCSP> csp = std::make_shared<ClausalCSP>();
  std::vector<Fact> given;
  int line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("line " + std::to_string(line_no) + ": " + msg);
  }

  void declare_vars() {
    if (types.size() < 2) fail("at least two entity types are required");
    for (std::size_t t = 0; t < types.size(); ++t) {
      if (entities_by_type[t].empty()) fail("type '" + types[t] + "' has no entities");
    }
    for (std::size_t t1 = 0; t1 < types.size(); ++t1) {
      for (std::size_t t2 = t1 + 1; t2 < types.size(); ++t2) {
        for (const auto& a : entities_by_type[t1]) {
          for (const auto& b : entities_by_type[t2]) {
            const VarId id = csp->num_vars();
            BoolVarMeta meta;
            meta.name = "assoc(" + a + "," + b + ")";
            meta.entity_a = a;
            meta.entity_b = b;
            csp->vars.push_back(meta);
            var_index[{a, b}] = id;
            DecisionVar dv;
            dv.name = meta.name;
            dv.values = {0, 1};
            dv.value_lits = {Lit::neg(id), Lit::pos(id)};
            dv.bool_vars = {id};
            csp->decision_vars.push_back(std::move(dv));
          }
        }
      }
    }
  }

  Lit parse_lit(std::string tok) {
    bool positive = true;
    if (!tok.empty() && (tok[0] == '-' || tok[0] == '~')) {
      positive = false;
      tok = tok.substr(1);
    }
    if (tok.rfind("assoc(", 0) != 0 || tok.back() != ')') fail("undeclared variable '" + tok + "'");
    const std::string inner = tok.substr(6, tok.size() - 7);
    const auto comma = inner.find(',');
    if (comma == std::string::npos) fail("undeclared variable '" + tok + "'");
    std::string a = inner.substr(0, comma), b = inner.substr(comma + 1);
    auto it = var_index.find({a, b});
    if (it == var_index.end()) it = var_index.find({b, a});
    if (it == var_index.end()) fail("undeclared variable '" + tok + "'");
    return Lit(it->second, positive);
  }

  Clause parse_clause(const std::string& line) {
    std::vector<Lit> lits;
    for (const auto& tok : split_ws(line)) lits.push_back(parse_lit(tok));
    try {
      return make_clause(std::move(lits));
    } catch (const ClauseError& e) {
      fail(e.what());
    }
  }
};

}  // namespace

LoadedPuzzle load_logic_grid(std::istream& in, std::string puzzle_id) {
  Parser p;
  enum class Section { kNone, kEntities, kGiven, kGroup } section = Section::kNone;
  bool vars_declared = false;
  std::string raw;
  auto ensure_vars = [&] {
    if (!vars_declared) {
      p.declare_vars();
      vars_declared = true;
    }
  };

  while (std::getline(in, raw)) {
    ++p.line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    if (line.rfind("types:", 0) == 0) {
      if (!p.types.empty()) p.fail("duplicate types section");
      p.types = split_ws(line.substr(6));
      p.entities_by_type.assign(p.types.size(), {});
      section = Section::kNone;
      continue;
    }
    if (line == "entities:") {
      if (p.types.empty()) p.fail("entities declared before types");
      section = Section::kEntities;
      continue;
    }
    if (line.rfind("given:", 0) == 0) {
      ensure_vars();
      section = Section::kGiven;
      const std::string rest = trim(line.substr(6));
      for (const auto& tok : split_ws(rest)) {
        const Lit l = p.parse_lit(tok);
        p.given.push_back(Fact{l.var(), l.positive() ? 1 : 0, l});
      }
      continue;
    }
    if (line.rfind("group ", 0) == 0) {
      if (line.back() != ':') p.fail("group header must end with ':'");
      const auto parts = split_ws(line.substr(6, line.size() - 7));
      if (parts.size() != 2) p.fail("expected 'group <id> <category>:'");
      ensure_vars();
      ConstraintGroup g;
      g.id = p.csp->num_groups();
      g.name = parts[0];
      g.category = parse_category(parts[1]);
      if (g.category == Category::kBlock || g.category == Category::kRow ||
          g.category == Category::kCol) {
        p.fail("category '" + parts[1] + "' is not a logic-grid category");
      }
      p.csp->groups.push_back(std::move(g));
      section = Section::kGroup;
      continue;
    }

    switch (section) {
      case Section::kEntities: {
        const auto colon = line.find(':');
        if (colon == std::string::npos) p.fail("expected '<type>: <entities...>'");
        const std::string type = trim(line.substr(0, colon));
        const auto it = std::find(p.types.begin(), p.types.end(), type);
        if (it == p.types.end()) p.fail("unknown type '" + type + "'");
        const int t = static_cast<int>(it - p.types.begin());
        for (const auto& e : split_ws(line.substr(colon + 1))) {
          if (p.entity_type.count(e)) p.fail("duplicate entity '" + e + "'");
          p.entity_type[e] = t;
          p.entities_by_type[t].push_back(e);
        }
        break;
      }
      case Section::kGiven:
        for (const auto& tok : split_ws(line)) {
          const Lit l = p.parse_lit(tok);
          p.given.push_back(Fact{l.var(), l.positive() ? 1 : 0, l});
        }
        break;
      case Section::kGroup:
        p.csp->groups.back().clauses.push_back(p.parse_clause(line));
        break;
      case Section::kNone:
        p.fail("content outside of a section: '" + line + "'");
    }
  }
  if (p.types.empty()) throw ParseError("missing types section");
  ensure_vars();

  auto& csp = *p.csp;
  csp.kind = PuzzleKind::kLogicGrid;
  for (auto& g : csp.groups) {
    if (g.clauses.empty()) throw ParseError("group '" + g.name + "' has no clauses");
    for (const Clause& c : g.clauses) {
      for (Lit l : c.lits) g.scope.push_back(l.var());
    }
    std::sort(g.scope.begin(), g.scope.end());
    g.scope.erase(std::unique(g.scope.begin(), g.scope.end()), g.scope.end());
  }
  csp.finalize();

  std::sort(p.given.begin(), p.given.end(),
            [](const Fact& a, const Fact& b) { return a.variable < b.variable; });

  Solver solver;
  for (const Clause& c : all_clauses(csp)) solver.add_clause(c);
  std::vector<Lit> assumptions;
  for (const Fact& f : p.given) assumptions.push_back(f.literal);
  const SatResult model = solver.solve(assumptions);
  if (!model.sat()) throw ModelError("logic-grid puzzle is unsatisfiable");

  Instance inst;
  inst.puzzle_id = std::move(puzzle_id);
  inst.given = p.given;
  inst.targets = explainable_facts(csp, inst.given);
  for (int d = 0; d < static_cast<int>(csp.decision_vars.size()); ++d) {
    inst.solution.push_back(csp.fact(d, model.value(Lit::pos(d)) ? 1 : 0));
  }
  inst.csp = p.csp;
  return LoadedPuzzle{p.csp, std::move(inst)};
}

LoadedPuzzle load_logic_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open puzzle file " + path);
  std::string stem = path.substr(path.find_last_of('/') + 1);
  return load_logic_grid(in, stem.substr(0, stem.find_last_of('.')));
}

}  // namespace machop
