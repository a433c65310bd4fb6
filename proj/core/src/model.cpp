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

#include "machop/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace machop {

int category_slot(Category c) {
  switch (c) {
    case Category::kBlock:
    case Category::kBijectivity:
      return 0;
    case Category::kRow:
    case Category::kTransitivity:
      return 1;
    case Category::kCol:
    case Category::kClue:
      return 2;
  }
  return 2;
}

std::string_view category_name(Category c) {
  switch (c) {
    case Category::kBlock: return "block";
    case Category::kRow: return "row";
    case Category::kCol: return "col";
    case Category::kBijectivity: return "bijectivity";
    case Category::kTransitivity: return "transitivity";
    case Category::kClue: return "clue";
  }
  return "clue";
}

Category parse_category(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "block") return Category::kBlock;
  if (lower == "row") return Category::kRow;
  if (lower == "col" || lower == "column") return Category::kCol;
  if (lower == "bijectivity") return Category::kBijectivity;
  if (lower == "transitivity") return Category::kTransitivity;
  if (lower == "clue") return Category::kClue;
  throw ParseError("unknown constraint category '" + std::string(s) + "'");
}

int ClausalCSP::num_clauses() const {
  int n = static_cast<int>(base_clauses.size());
  for (const auto& g : groups) n += static_cast<int>(g.clauses.size());
  return n;
}

Fact ClausalCSP::fact(int decision_var, int value) const {
  const DecisionVar& dv = decision_vars.at(decision_var);
  for (std::size_t k = 0; k < dv.values.size(); ++k) {
    if (dv.values[k] == value) return Fact{decision_var, value, dv.value_lits[k]};
  }
  throw ModelError("value " + std::to_string(value) + " outside the domain of " + dv.name);
}

std::string ClausalCSP::describe(const Fact& f) const {
  const DecisionVar& dv = decision_vars.at(f.variable);
  if (kind == PuzzleKind::kSudoku) return dv.name + "=" + std::to_string(f.value);
  return (f.value ? "" : "-") + dv.name;
}

void ClausalCSP::finalize() {
  owner_.assign(vars.size(), -1);
  for (std::size_t d = 0; d < decision_vars.size(); ++d) {
    for (VarId v : decision_vars[d].bool_vars) owner_[v] = static_cast<int>(d);
  }
  groups_of_.assign(decision_vars.size(), {});
  for (const auto& g : groups) {
    std::vector<int> touched;
    for (VarId v : g.scope) touched.push_back(owner_[v]);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int d : touched) {
      if (d >= 0) groups_of_[d].push_back(g.id);
    }
  }
}

std::vector<Clause> all_clauses(const ClausalCSP& csp) {
  std::vector<Clause> out = csp.base_clauses;
  for (const auto& g : csp.groups) out.insert(out.end(), g.clauses.begin(), g.clauses.end());
  return out;
}

namespace {

std::vector<Lit> given_lits(const std::vector<Fact>& given) {
  std::vector<Lit> lits;
  lits.reserve(given.size());
  for (const Fact& f : given) lits.push_back(f.literal);
  return lits;
}

void add_exactly_one(std::vector<Clause>& out, const std::vector<VarId>& vars) {
  std::vector<Lit> alo;
  for (VarId v : vars) alo.push_back(Lit::pos(v));
  out.push_back(make_clause(std::move(alo)));
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = i + 1; j < vars.size(); ++j) {
      out.push_back(make_clause({Lit::neg(vars[i]), Lit::neg(vars[j])}));
    }
  }
}

}  // namespace

int count_solutions(const ClausalCSP& csp, const std::vector<Fact>& given, int limit) {
  Solver solver;
  solver.reserve_vars(csp.num_vars());
  for (const Clause& c : all_clauses(csp)) solver.add_clause(c);
  const std::vector<Lit> assumptions = given_lits(given);
  int count = 0;
  while (count < limit) {
    SatResult r = solver.solve(assumptions);
    if (!r.sat()) break;
    ++count;
    // Block this assignment of the decision variables.
    std::vector<Lit> block;
    for (const DecisionVar& dv : csp.decision_vars) {
      for (Lit l : dv.value_lits) {
        if (r.value(l)) block.push_back(~l);
      }
    }
    if (block.empty() || !solver.add_clause(block)) break;
  }
  return count;
}

std::vector<Fact> explainable_facts(const ClausalCSP& csp, const std::vector<Fact>& given) {
  Solver solver;
  solver.reserve_vars(csp.num_vars());
  for (const Clause& c : all_clauses(csp)) solver.add_clause(c);
  std::vector<Lit> assumptions = given_lits(given);
  const SatResult model = solver.solve(assumptions);
  if (!model.sat()) throw ModelError("given facts are inconsistent with the constraints");

  std::vector<char> known(csp.decision_vars.size(), 0);
  for (const Fact& f : given) known[f.variable] = 1;

  std::vector<Fact> out;
  for (std::size_t d = 0; d < csp.decision_vars.size(); ++d) {
    if (known[d]) continue;
    const DecisionVar& dv = csp.decision_vars[d];
    // Only the value taken in some model can be forced.
    for (std::size_t k = 0; k < dv.values.size(); ++k) {
      if (!model.value(dv.value_lits[k])) continue;
      assumptions.push_back(~dv.value_lits[k]);
      const bool forced = !solver.solve(assumptions).sat();
      assumptions.pop_back();
      if (forced) out.push_back(Fact{static_cast<int>(d), dv.values[k], dv.value_lits[k]});
      break;
    }
  }
  return out;
}

LoadedPuzzle load_sudoku(std::string_view text, std::string puzzle_id) {
  std::string cells;
  for (char ch : text) {
    if (ch == '|' || std::isspace(static_cast<unsigned char>(ch))) continue;
    cells.push_back(ch);
  }
  int n = 0;
  if (cells.size() == 16) n = 4;
  else if (cells.size() == 81) n = 9;
  else throw ParseError("sudoku grid must have 16 or 81 cells, got " + std::to_string(cells.size()));
  const int b = static_cast<int>(std::lround(std::sqrt(n)));

  auto csp = std::make_shared<ClausalCSP>();
  csp->kind = PuzzleKind::kSudoku;
  csp->size = n;
  auto var_of = [n](int r, int c, int v) { return (r * n + c) * n + (v - 1); };
  csp->vars.resize(static_cast<std::size_t>(n) * n * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      DecisionVar dv;
      dv.name = "cell[" + std::to_string(r + 1) + "," + std::to_string(c + 1) + "]";
      std::vector<VarId> cell;
      for (int v = 1; v <= n; ++v) {
        const VarId id = var_of(r, c, v);
        csp->vars[id] = BoolVarMeta{r + 1, c + 1, v, "x" + std::to_string(r + 1) +
                                                         std::to_string(c + 1) + std::to_string(v),
                                    "", ""};
        dv.values.push_back(v);
        dv.value_lits.push_back(Lit::pos(id));
        dv.bool_vars.push_back(id);
        cell.push_back(id);
      }
      add_exactly_one(csp->base_clauses, cell);
      csp->decision_vars.push_back(std::move(dv));
    }
  }

  auto add_unit = [&](Category cat, const std::string& name,
                      const std::vector<std::pair<int, int>>& unit) {
    ConstraintGroup g;
    g.id = static_cast<int>(csp->groups.size());
    g.name = name;
    g.category = cat;
    for (int v = 1; v <= n; ++v) {
      std::vector<VarId> vs;
      for (auto [r, c] : unit) vs.push_back(var_of(r, c, v));
      add_exactly_one(g.clauses, vs);
      g.scope.insert(g.scope.end(), vs.begin(), vs.end());
    }
    std::sort(g.scope.begin(), g.scope.end());
    csp->groups.push_back(std::move(g));
  };
  for (int r = 0; r < n; ++r) {
    std::vector<std::pair<int, int>> unit;
    for (int c = 0; c < n; ++c) unit.emplace_back(r, c);
    add_unit(Category::kRow, "row" + std::to_string(r + 1), unit);
  }
  for (int c = 0; c < n; ++c) {
    std::vector<std::pair<int, int>> unit;
    for (int r = 0; r < n; ++r) unit.emplace_back(r, c);
    add_unit(Category::kCol, "col" + std::to_string(c + 1), unit);
  }
  for (int k = 0; k < n; ++k) {
    std::vector<std::pair<int, int>> unit;
    const int r0 = (k / b) * b, c0 = (k % b) * b;
    for (int r = r0; r < r0 + b; ++r) {
      for (int c = c0; c < c0 + b; ++c) unit.emplace_back(r, c);
    }
    add_unit(Category::kBlock, "block" + std::to_string(k + 1), unit);
  }
  csp->finalize();

  Instance inst;
  inst.puzzle_id = std::move(puzzle_id);
  for (int i = 0; i < n * n; ++i) {
    const char ch = cells[i];
    if (ch == '.') continue;
    if (ch < '1' || ch > '0' + n) {
      throw ParseError(std::string("invalid sudoku character '") + ch + "'");
    }
    inst.given.push_back(csp->fact(i, ch - '0'));
  }

  const int solutions = count_solutions(*csp, inst.given, 2);
  if (solutions == 0) throw ModelError("sudoku grid has no solution");
  if (solutions > 1) throw ModelError("sudoku grid has more than one solution");

  Solver solver;
  for (const Clause& c : all_clauses(*csp)) solver.add_clause(c);
  const SatResult model = solver.solve(given_lits(inst.given));
  std::vector<char> known(csp->decision_vars.size(), 0);
  for (const Fact& f : inst.given) known[f.variable] = 1;
  for (int d = 0; d < n * n; ++d) {
    for (int v = 1; v <= n; ++v) {
      if (model.value(Lit::pos(var_of(d / n, d % n, v)))) {
        const Fact f = csp->fact(d, v);
        inst.solution.push_back(f);
        if (!known[d]) inst.targets.push_back(f);
      }
    }
  }
  inst.csp = csp;
  return LoadedPuzzle{csp, std::move(inst)};
}

LoadedPuzzle load_puzzle_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open puzzle file " + path);
  std::string stem = path.substr(path.find_last_of('/') + 1);
  const auto dot = stem.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : stem.substr(dot + 1);
  if (dot != std::string::npos) stem = stem.substr(0, dot);
  if (ext == "lgp") {
    return load_logic_grid(in, stem);
  }
  std::string line, text;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    text += line;
  }
  return load_sudoku(text, stem);
}

}  // namespace machop
