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

#include "machop/sat.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace machop {

Lit Lit::from_dimacs(int d) {
  if (d == 0) throw ClauseError("DIMACS literal 0 is a terminator, not a literal");
  return d > 0 ? Lit::pos(d - 1) : Lit::neg(-d - 1);
}

Clause make_clause(std::vector<Lit> lits) {
  if (lits.empty()) throw ClauseError("empty clause");
  std::vector<Lit> sorted = lits;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1]) throw ClauseError("duplicate literal in clause");
    if (sorted[i].var() == sorted[i - 1].var()) {
      throw ClauseError("complementary literals in clause");
    }
  }
  return Clause{std::move(lits)};
}

VarId Solver::new_var() {
  const VarId v = num_vars();
  reserve_vars(v + 1);
  return v;
}

void Solver::reserve_vars(int n) {
  if (n <= num_vars()) return;
  values_.resize(n, kUndef);
  level_.resize(n, 0);
  reason_.resize(n, kNoReason);
  seen_.resize(n, 0);
  watches_.resize(2 * static_cast<std::size_t>(n));
}

int Solver::attach(const std::vector<Lit>& lits, bool learned) {
  const int id = static_cast<int>(clause_start_.size()) - 1;
  arena_.insert(arena_.end(), lits.begin(), lits.end());
  clause_start_.push_back(static_cast<int>(arena_.size()));
  clause_learned_.push_back(learned ? 1 : 0);
  if (learned) ++num_learned_;
  watches_[lits[0].code()].push_back(id);
  watches_[lits[1].code()].push_back(id);
  return id;
}

bool Solver::add_clause(std::span<const Lit> lits) {
  if (trivially_unsat_) return false;
  std::vector<Lit> c(lits.begin(), lits.end());
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (c[i].var() == c[i - 1].var()) return true;  // tautology
  }
  if (c.empty()) {
    trivially_unsat_ = true;
    return false;
  }
  for (Lit l : c) reserve_vars(l.var() + 1);
  if (c.size() == 1) {
    units_.push_back(c[0]);
    return true;
  }
  // Keep the caller's literal order for the watched positions.
  std::vector<Lit> ordered;
  ordered.reserve(c.size());
  for (Lit l : lits) {
    if (std::find(ordered.begin(), ordered.end(), l) == ordered.end()) ordered.push_back(l);
  }
  attach(ordered, false);
  return true;
}

void Solver::assign(Lit l, int reason) {
  values_[l.var()] = l.positive() ? kTrue : kFalse;
  level_[l.var()] = decision_level();
  reason_[l.var()] = reason;
  trail_.push_back(l);
}

int Solver::propagate() {
  while (qhead_ < static_cast<int>(trail_.size())) {
    const Lit p = trail_[qhead_++];
    const Lit false_lit = ~p;
    std::vector<int>& ws = watches_[false_lit.code()];
    std::size_t i = 0, j = 0;
    int conflict = kNoReason;
    while (i < ws.size()) {
      const int cid = ws[i++];
      Lit* c = arena_.data() + clause_start_[cid];
      const int len = clause_start_[cid + 1] - clause_start_[cid];
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (lit_value(c[0]) == kTrue) {
        ws[j++] = cid;
        continue;
      }
      bool moved = false;
      for (int k = 2; k < len; ++k) {
        if (lit_value(c[k]) != kFalse) {
          std::swap(c[1], c[k]);
          watches_[c[1].code()].push_back(cid);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = cid;
      if (lit_value(c[0]) == kFalse) {
        conflict = cid;
        while (i < ws.size()) ws[j++] = ws[i++];
        break;
      }
      assign(c[0], cid);
    }
    ws.resize(j);
    if (conflict != kNoReason) return conflict;
  }
  return kNoReason;
}

void Solver::backtrack_to(int level) {
  if (level >= decision_level()) return;
  const int start = trail_lim_[level];
  for (int k = static_cast<int>(trail_.size()) - 1; k >= start; --k) {
    values_[trail_[k].var()] = kUndef;
    reason_[trail_[k].var()] = kNoReason;
  }
  trail_.resize(start);
  trail_lim_.resize(level);
  qhead_ = static_cast<int>(trail_.size());
}

void Solver::reset() {
  for (Lit l : trail_) {
    values_[l.var()] = kUndef;
    reason_[l.var()] = kNoReason;
  }
  trail_.clear();
  trail_lim_.clear();
  qhead_ = 0;
}

std::vector<Lit> Solver::analyze(int conflict, int& backjump) {
  std::vector<Lit> learnt{Lit()};
  int open = 0;
  int idx = static_cast<int>(trail_.size()) - 1;
  Lit p;
  bool have_p = false;
  int cid = conflict;
  do {
    const int begin = clause_start_[cid], end = clause_start_[cid + 1];
    for (int k = begin; k < end; ++k) {
      const Lit q = arena_[k];
      if (have_p && q.var() == p.var()) continue;
      const VarId v = q.var();
      if (seen_[v] || level_[v] == 0) continue;
      seen_[v] = 1;
      if (level_[v] == decision_level()) ++open;
      else learnt.push_back(q);
    }
    while (!seen_[trail_[idx].var()]) --idx;
    p = trail_[idx--];
    have_p = true;
    cid = reason_[p.var()];
    seen_[p.var()] = 0;
    --open;
  } while (open > 0);
  learnt[0] = ~p;

  backjump = 0;
  std::size_t max_k = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    seen_[learnt[k].var()] = 0;
    if (level_[learnt[k].var()] > backjump) {
      backjump = level_[learnt[k].var()];
      max_k = k;
    }
  }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_k]);
  return learnt;
}

void Solver::reduce_learned() {
  std::vector<Lit> arena;
  std::vector<int> start{0};
  std::vector<char> learned;
  for (auto& w : watches_) w.clear();
  for (std::size_t c = 0; c + 1 < clause_start_.size(); ++c) {
    if (clause_learned_[c]) continue;
    const int id = static_cast<int>(start.size()) - 1;
    arena.insert(arena.end(), arena_.begin() + clause_start_[c], arena_.begin() + clause_start_[c + 1]);
    start.push_back(static_cast<int>(arena.size()));
    learned.push_back(0);
    watches_[arena[start[id]].code()].push_back(id);
    watches_[arena[start[id] + 1].code()].push_back(id);
  }
  arena_ = std::move(arena);
  clause_start_ = std::move(start);
  clause_learned_ = std::move(learned);
  num_learned_ = 0;
}

SatResult Solver::solve(std::span<const Lit> assumptions) {
  ++calls_;
  SatResult result;
  reset();
  if (trivially_unsat_) return result;
  for (Lit a : assumptions) reserve_vars(a.var() + 1);
  const int original = static_cast<int>(clause_learned_.size()) - num_learned_;
  if (num_learned_ > 2 * original + 10000) reduce_learned();

  for (Lit u : units_) {
    const auto v = lit_value(u);
    if (v == kFalse) {
      trivially_unsat_ = true;
      reset();
      return result;
    }
    if (v == kUndef) assign(u, kNoReason);
  }
  if (propagate() != kNoReason) {
    trivially_unsat_ = true;
    reset();
    return result;
  }

  VarId scan = 0;
  for (;;) {
    const int conflict = propagate();
    if (conflict != kNoReason) {
      ++conflicts_;
      if (decision_level() == 0) {
        trivially_unsat_ = true;
        reset();
        return result;
      }
      int backjump = 0;
      std::vector<Lit> learnt = analyze(conflict, backjump);
      backtrack_to(backjump);
      scan = 0;
      if (learnt.size() == 1) {
        units_.push_back(learnt[0]);
        assign(learnt[0], kNoReason);
      } else {
        assign(learnt[0], attach(learnt, true));
      }
      continue;
    }

    Lit decision;
    if (decision_level() < static_cast<int>(assumptions.size())) {
      const Lit a = assumptions[decision_level()];
      const auto v = lit_value(a);
      if (v == kFalse) {
        reset();
        return result;
      }
      trail_lim_.push_back(static_cast<int>(trail_.size()));
      if (v == kUndef) assign(a, kNoReason);
      continue;
    }
    while (scan < num_vars() && values_[scan] != kUndef) ++scan;
    if (scan == num_vars()) {
      result.status = SatStatus::kSat;
      result.model.resize(values_.size());
      for (std::size_t v = 0; v < values_.size(); ++v) result.model[v] = values_[v] == kTrue;
      reset();
      return result;
    }
    decision = Lit::pos(scan);
    ++decisions_;
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    assign(decision, kNoReason);
  }
}

SatResult solve(std::span<const Clause> clauses, std::span<const Lit> assumptions) {
  Solver s;
  for (const Clause& c : clauses) s.add_clause(c);
  return s.solve(assumptions);
}

SubsetOracle::SubsetOracle(Solver& solver, std::vector<SubsetItem> items)
    : solver_(&solver), items_(std::move(items)) {}

SubsetOracle SubsetOracle::from_clauses(Solver& solver, std::span<const Clause> base,
                                        std::span<const std::vector<Clause>> items) {
  for (const Clause& c : base) solver.add_clause(c);
  std::vector<SubsetItem> out;
  out.reserve(items.size());
  for (const auto& clauses : items) {
    SubsetItem it;
    it.body = clauses;
    if (clauses.size() == 1 && clauses[0].lits.size() == 1) {
      it.on.push_back(clauses[0].lits[0]);
    } else {
      const VarId sel = solver.new_var();
      for (const Clause& c : clauses) {
        std::vector<Lit> guarded = c.lits;
        guarded.push_back(Lit::neg(sel));
        solver.add_clause(guarded);
      }
      it.on.push_back(Lit::pos(sel));
      it.off.push_back(Lit::neg(sel));
    }
    out.push_back(std::move(it));
  }
  return SubsetOracle(solver, std::move(out));
}

SatResult SubsetOracle::check(std::span<const int> subset) {
  std::vector<char> on(items_.size(), 0);
  for (int i : subset) on[i] = 1;
  std::vector<Lit> assumptions;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const auto& src = on[i] ? items_[i].on : items_[i].off;
    assumptions.insert(assumptions.end(), src.begin(), src.end());
  }
  ++sat_calls_;
  return solver_->solve(assumptions);
}

bool SubsetOracle::model_satisfies(const SatResult& r, int item) const {
  const SubsetItem& it = items_[item];
  if (it.body.empty()) {
    return std::all_of(it.on.begin(), it.on.end(), [&](Lit l) { return r.value(l); });
  }
  for (const Clause& c : it.body) {
    if (std::none_of(c.lits.begin(), c.lits.end(), [&](Lit l) { return r.value(l); })) {
      return false;
    }
  }
  return true;
}

std::vector<int> SubsetOracle::grow(std::span<const int> selected) {
  std::vector<int> order(items_.size());
  std::iota(order.begin(), order.end(), 0);
  return grow(selected, order);
}

std::vector<int> SubsetOracle::grow(std::span<const int> selected, std::span<const int> order) {
  std::vector<int> current(selected.begin(), selected.end());
  SatResult model = check(current);
  if (!model.sat()) throw std::logic_error("grow: selected items are unsatisfiable");
  std::vector<char> in(items_.size(), 0);
  for (int i : current) in[i] = 1;
  for (int i : order) {
    if (in[i]) continue;
    if (model_satisfies(model, i)) {
      current.push_back(i);
      in[i] = 1;
      continue;
    }
    current.push_back(i);
    SatResult r = check(current);
    if (r.sat()) {
      in[i] = 1;
      model = std::move(r);
    } else {
      current.pop_back();
    }
  }
  std::sort(current.begin(), current.end());
  return current;
}

}  // namespace machop
