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

// Clausal encodings of Sudoku and logic-grid puzzles. Every constraint the
// explanation engine may select is a ConstraintGroup; clauses that are always
// active (the per-cell exactly-one rows of the Sudoku encoding) live in
// ClausalCSP::base_clauses and are never selectable.

#ifndef MACHOP_MODEL_HPP_
#define MACHOP_MODEL_HPP_

#include <istream>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "machop/sat.hpp"

namespace machop {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PuzzleKind { kSudoku, kLogicGrid };

enum class Category { kBlock, kRow, kCol, kBijectivity, kTransitivity, kClue };

// Position of a category inside its puzzle family's three-way split
// (Block/Row/Col for Sudoku, Bijectivity/Transitivity/Clue for logic grids).
int category_slot(Category c);
std::string_view category_name(Category c);
Category parse_category(std::string_view s);  // throws ParseError

// Metadata of one Boolean variable. Sudoku variables carry 1-based
// (row, col, value); logic-grid variables name an entity pair.
struct BoolVarMeta {
  int row = 0;
  int col = 0;
  int value = 0;
  std::string name;
  std::string entity_a;
  std::string entity_b;
};

struct ConstraintGroup {
  int id = 0;
  std::string name;
  Category category = Category::kClue;
  std::vector<VarId> scope;  // sorted, equals the variables of `clauses`
  std::vector<Clause> clauses;
};

// A decision variable of the original CSP: a Sudoku cell or a logic-grid
// association. Each domain value maps to the literal asserting it.
struct DecisionVar {
  std::string name;
  std::vector<int> values;
  std::vector<Lit> value_lits;
  std::vector<VarId> bool_vars;
};

struct Fact {
  int variable = 0;  // index into ClausalCSP::decision_vars
  int value = 0;
  Lit literal;

  friend bool operator==(const Fact& a, const Fact& b) {
    return a.variable == b.variable && a.value == b.value;
  }
};

class ClausalCSP {
 public:
  PuzzleKind kind = PuzzleKind::kSudoku;
  int size = 0;  // Sudoku side length; 0 for logic grids
  std::vector<BoolVarMeta> vars;
  std::vector<ConstraintGroup> groups;
  std::vector<Clause> base_clauses;
  std::vector<DecisionVar> decision_vars;

  int num_vars() const { return static_cast<int>(vars.size()); }
  int num_groups() const { return static_cast<int>(groups.size()); }
  int num_clauses() const;

  // Decision variable that owns a Boolean variable.
  int owner(VarId v) const { return owner_[v]; }
  // Groups whose scope touches the decision variable, ascending id.
  const std::vector<int>& groups_of(int decision_var) const { return groups_of_[decision_var]; }

  Fact fact(int decision_var, int value) const;
  std::string describe(const Fact& f) const;

  // Fills the owner / incidence indexes; call once after construction.
  void finalize();

 private:
  std::vector<int> owner_;
  std::vector<std::vector<int>> groups_of_;
};

// A CSP state <C, I, T>: the constraints, the facts already known, and the
// facts still to be explained.
struct Instance {
  std::shared_ptr<const ClausalCSP> csp;
  std::string puzzle_id;
  std::vector<Fact> given;
  std::vector<Fact> targets;
  // One full solution (the unique one for Sudoku).
  std::vector<Fact> solution;
};

struct LoadedPuzzle {
  std::shared_ptr<const ClausalCSP> csp;
  Instance instance;
};

// `text` holds n*n characters, digits 1..n or '.', row-major; '|' and
// whitespace are ignored. n must be 4 or 9. Rejects unsatisfiable grids and
// grids with more than one solution.
LoadedPuzzle load_sudoku(std::string_view text, std::string puzzle_id = "");

// Line-oriented logic-grid format; see docs/logic_grid_format.md.
LoadedPuzzle load_logic_grid(std::istream& in, std::string puzzle_id = "");
LoadedPuzzle load_logic_grid_file(const std::string& path);
LoadedPuzzle load_puzzle_file(const std::string& path);

// Facts outside `given` that hold in every solution extending `given`.
// Sorted by decision variable.
std::vector<Fact> explainable_facts(const ClausalCSP& csp, const std::vector<Fact>& given);

// All clauses of the CSP (base + every group).
std::vector<Clause> all_clauses(const ClausalCSP& csp);

// Counts solutions extending `given`, stopping at `limit`.
int count_solutions(const ClausalCSP& csp, const std::vector<Fact>& given, int limit);

}  // namespace machop

#endif  // MACHOP_MODEL_HPP_
