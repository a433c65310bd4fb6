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

#ifndef MACHOP_SAT_HPP_
#define MACHOP_SAT_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace machop {

using VarId = int;

// A literal packs a variable and a polarity as 2*var + (negated ? 1 : 0).
class Lit {
 public:
  constexpr Lit() = default;
  constexpr Lit(VarId var, bool positive) : code_(2 * var + (positive ? 0 : 1)) {}

  static constexpr Lit pos(VarId var) { return Lit(var, true); }
  static constexpr Lit neg(VarId var) { return Lit(var, false); }
  static constexpr Lit from_code(int code) {
    Lit l;
    l.code_ = code;
    return l;
  }
  // DIMACS convention: +v / -v with 1-based variables.
  static Lit from_dimacs(int d);
  int to_dimacs() const { return positive() ? var() + 1 : -(var() + 1); }

  constexpr VarId var() const { return code_ >> 1; }
  constexpr bool positive() const { return (code_ & 1) == 0; }
  constexpr int code() const { return code_; }
  constexpr Lit operator~() const { return from_code(code_ ^ 1); }

  friend constexpr bool operator==(Lit a, Lit b) = default;
  friend constexpr auto operator<=>(Lit a, Lit b) = default;

 private:
  int code_ = 0;
};

// Disjunction of literals. Construction via make_clause() normalizes and
// checks the well-formedness rules (non-empty, no duplicates, no x/~x).
struct Clause {
  std::vector<Lit> lits;
};

class ClauseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Clause make_clause(std::vector<Lit> lits);

enum class SatStatus { kSat, kUnsat };

struct SatResult {
  SatStatus status = SatStatus::kUnsat;
  // One truth value per variable when kSat; empty otherwise.
  std::vector<bool> model;

  bool sat() const { return status == SatStatus::kSat; }
  bool value(Lit l) const { return model[l.var()] == l.positive(); }
};

// Conflict-driven solver with two-watched-literal propagation, first-UIP
// clause learning and non-chronological backjumping. Branching picks the
// lowest unassigned variable, positive phase first, so results are
// reproducible for a fixed sequence of calls. Clauses may be added between
// solve() calls; assumptions only live for one call, learned clauses persist.
class Solver {
 public:
  Solver() = default;
  explicit Solver(int num_vars) { reserve_vars(num_vars); }

  int num_vars() const { return static_cast<int>(values_.size()); }
  VarId new_var();
  void reserve_vars(int n);

  // Returns false once the clause database is trivially unsatisfiable.
  bool add_clause(std::span<const Lit> lits);
  bool add_clause(const Clause& c) { return add_clause(c.lits); }

  SatResult solve(std::span<const Lit> assumptions = {});

  std::int64_t decisions() const { return decisions_; }
  std::int64_t conflicts() const { return conflicts_; }
  std::int64_t calls() const { return calls_; }

 private:
  enum : std::int8_t { kFalse = 0, kTrue = 1, kUndef = 2 };
  static constexpr int kNoReason = -1;

  std::int8_t lit_value(Lit l) const {
    std::int8_t v = values_[l.var()];
    if (v == kUndef) return kUndef;
    return static_cast<std::int8_t>(l.positive() ? v : 1 - v);
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  void assign(Lit l, int reason);
  // Returns the conflicting clause, or kNoReason.
  int propagate();
  void backtrack_to(int level);
  void reset();
  // First-UIP analysis; returns the learned clause (asserting literal first)
  // and the backjump level.
  std::vector<Lit> analyze(int conflict, int& backjump);
  int attach(const std::vector<Lit>& lits, bool learned);
  void reduce_learned();

  std::vector<std::int8_t> values_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<char> seen_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  int qhead_ = 0;

  // Clause storage: flat literal arena, clause i spans [start[i], start[i+1]).
  std::vector<Lit> arena_;
  std::vector<int> clause_start_{0};
  std::vector<char> clause_learned_;
  int num_learned_ = 0;
  // watches_[lit.code()] lists the clauses in which `lit` is one of the two
  // watched literals (always kept at positions 0 and 1).
  std::vector<std::vector<int>> watches_;
  std::vector<Lit> units_;
  bool trivially_unsat_ = false;

  std::int64_t decisions_ = 0;
  std::int64_t conflicts_ = 0;
  std::int64_t calls_ = 0;
};

SatResult solve(std::span<const Clause> clauses, std::span<const Lit> assumptions = {});

// A selectable item for subset queries. An item is switched on by assuming
// `on`; when it is off, `off` literals (typically the negated selector of a
// guarded clause group) are assumed so the item stays inert. `body` holds the
// item's clauses and is used to check whether a model already satisfies it.
struct SubsetItem {
  std::vector<Lit> on;
  std::vector<Lit> off;
  std::vector<Clause> body;
};

// Satisfiability of item subsets on top of a shared solver that already
// holds the base clauses and any guarded item clauses.
class SubsetOracle {
 public:
  SubsetOracle(Solver& solver, std::vector<SubsetItem> items);

  // Builds a solver with `base` plus every item's clauses guarded by a fresh
  // selector variable. Unit items are assumed directly without a selector.
  static SubsetOracle from_clauses(Solver& solver, std::span<const Clause> base,
                                   std::span<const std::vector<Clause>> items);

  int size() const { return static_cast<int>(items_.size()); }
  const SubsetItem& item(int i) const { return items_[i]; }

  SatResult check(std::span<const int> subset);
  bool satisfiable(std::span<const int> subset) { return check(subset).sat(); }

  // Greedy maximal satisfiable superset: visits the remaining items in
  // ascending index order and keeps each one that preserves satisfiability.
  // Throws std::logic_error if `selected` is itself unsatisfiable.
  std::vector<int> grow(std::span<const int> selected);
  // Same, but only `order` is visited, in the given order.
  std::vector<int> grow(std::span<const int> selected, std::span<const int> order);

  std::int64_t sat_calls() const { return sat_calls_; }

 private:
  bool model_satisfies(const SatResult& r, int item) const;

  Solver* solver_;
  std::vector<SubsetItem> items_;
  std::int64_t sat_calls_ = 0;
};

// DIMACS CNF import/export, mainly for debugging.
struct Cnf {
  int num_vars = 0;
  std::vector<Clause> clauses;
};
Cnf read_dimacs(std::istream& in);
void write_dimacs(std::ostream& out, const Cnf& cnf);

}  // namespace machop

#endif  // MACHOP_SAT_HPP_
