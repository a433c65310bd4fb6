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

// Independent reference implementations used as test oracles.

#ifndef MACHOP_TESTS_SUPPORT_HPP_
#define MACHOP_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "machop/explain.hpp"
#include "machop/hitting_set.hpp"
#include "machop/model.hpp"
#include "machop/sat.hpp"

namespace machop::testing {

inline std::string data_path(const std::string& rel) {
  return std::string(MACHOP_TEST_DATA_DIR) + "/" + rel;
}

// Truth-table satisfiability, for up to ~20 variables.
inline bool truth_table_sat(int num_vars, const std::vector<Clause>& clauses,
                            const std::vector<Lit>& assumptions = {}) {
  for (std::uint32_t m = 0; m < (1u << num_vars); ++m) {
    auto holds = [m](Lit l) { return (((m >> l.var()) & 1u) != 0) == l.positive(); };
    bool ok = std::all_of(assumptions.begin(), assumptions.end(), holds);
    for (std::size_t c = 0; ok && c < clauses.size(); ++c) {
      ok = std::any_of(clauses[c].lits.begin(), clauses[c].lits.end(), holds);
    }
    if (ok) return true;
  }
  return false;
}

// Plain recursive DPLL with unit propagation and no learning; slow but
// simple enough to trust on puzzle-sized formulas.
class ReferenceDpll {
 public:
  ReferenceDpll(int num_vars, std::vector<Clause> clauses)
      : num_vars_(num_vars), clauses_(std::move(clauses)) {}

  bool sat(const std::vector<Lit>& units) {
    std::vector<int> value(num_vars_, -1);
    for (Lit l : units) {
      const int want = l.positive() ? 1 : 0;
      if (value[l.var()] == 1 - want) return false;
      value[l.var()] = want;
    }
    return search(value);
  }

 private:
  bool propagate(std::vector<int>& value) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Clause& c : clauses_) {
        int open = 0;
        Lit last;
        bool satisfied = false;
        for (Lit l : c.lits) {
          const int v = value[l.var()];
          if (v < 0) {
            ++open;
            last = l;
          } else if ((v == 1) == l.positive()) {
            satisfied = true;
            break;
          }
        }
        if (satisfied) continue;
        if (open == 0) return false;
        if (open == 1) {
          value[last.var()] = last.positive() ? 1 : 0;
          changed = true;
        }
      }
    }
    return true;
  }

  bool search(std::vector<int> value) const {
    if (!propagate(value)) return false;
    const auto it = std::find(value.begin(), value.end(), -1);
    if (it == value.end()) return true;
    const auto var = it - value.begin();
    for (int choice : {1, 0}) {
      std::vector<int> next = value;
      next[var] = choice;
      if (search(next)) return true;
    }
    return false;
  }

  int num_vars_;
  std::vector<Clause> clauses_;
};

inline std::vector<Clause> random_cnf(std::mt19937_64& rng, int num_vars, int num_clauses,
                                      int max_width = 3) {
  std::uniform_int_distribution<int> var(0, num_vars - 1), width(1, max_width), sign(0, 1);
  std::vector<Clause> out;
  for (int c = 0; c < num_clauses; ++c) {
    std::vector<Lit> lits;
    const int w = width(rng);
    for (int k = 0; k < w; ++k) lits.push_back(Lit(var(rng), sign(rng) == 1));
    Clause cl;
    cl.lits = lits;
    out.push_back(cl);
  }
  return out;
}

// Unsatisfiability of an item subset of an explanation context, checked with
// the reference DPLL over the raw clauses.
inline bool subset_unsat(const ExplContext& ctx, const std::vector<int>& items) {
  const ClausalCSP& csp = ctx.csp();
  std::vector<Clause> clauses = csp.base_clauses;
  std::vector<Lit> units;
  for (int j : items) {
    if (j == ExplContext::kNegatedTarget) units.push_back(~ctx.target().literal);
    else if (ctx.is_fact_item(j)) units.push_back(ctx.fact_of_item(j).literal);
    else {
      const auto& g = csp.groups[ctx.group_of_item(j)].clauses;
      clauses.insert(clauses.end(), g.begin(), g.end());
    }
  }
  return !ReferenceDpll(csp.num_vars(), clauses).sat(units);
}

// Deletion-based minimality: dropping any item other than the negated target
// makes the subset satisfiable.
inline bool is_minimal_unsat(const ExplContext& ctx, const std::vector<int>& items) {
  if (!subset_unsat(ctx, items)) return false;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (items[k] == ExplContext::kNegatedTarget) continue;
    std::vector<int> rest = items;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
    if (subset_unsat(ctx, rest)) return false;
  }
  return true;
}

// Minimum total item cost over all unsatisfiable subsets that contain the
// negated target. Subsets are visited by ascending cost so the first
// unsatisfiable one is optimal.
inline double brute_force_min_cost(const ExplContext& ctx, const std::vector<double>& costs) {
  const int n = ctx.num_items();
  std::vector<std::pair<double, std::uint32_t>> subsets;
  for (std::uint32_t m = 0; m < (1u << (n - 1)); ++m) {
    double c = costs[0];
    for (int j = 1; j < n; ++j) {
      if ((m >> (j - 1)) & 1u) c += costs[j];
    }
    subsets.emplace_back(c, m);
  }
  std::sort(subsets.begin(), subsets.end());
  for (const auto& [cost, m] : subsets) {
    std::vector<int> items{0};
    for (int j = 1; j < n; ++j) {
      if ((m >> (j - 1)) & 1u) items.push_back(j);
    }
    if (subset_unsat(ctx, items)) return cost;
  }
  return -1.0;
}

struct BruteHit {
  bool feasible = false;
  std::vector<int> selection;
  double primary = 0.0;
  double secondary = 0.0;
};

// Exhaustive hitting-set optimum with its own feasibility and objective
// arithmetic. Ties are broken towards the smaller subset mask.
inline BruteHit brute_force_hitting_set(const HitProblem& p) {
  BruteHit best;
  for (std::uint32_t m = 0; m < (1u << p.num_items); ++m) {
    auto in = [m](int j) { return ((m >> j) & 1u) != 0; };
    bool ok = std::all_of(p.forced.begin(), p.forced.end(), in);
    for (std::size_t k = 0; ok && k < p.cover_sets.size(); ++k) {
      ok = std::any_of(p.cover_sets[k].begin(), p.cover_sets[k].end(), in);
    }
    if (!ok) continue;
    std::vector<int> phi(p.num_features, 0);
    double cost = 0.0;
    std::vector<int> sel;
    for (int j = 0; j < p.num_items; ++j) {
      if (!in(j)) continue;
      sel.push_back(j);
      cost += p.item_costs[j];
      for (int f : p.item_features[j]) ++phi[f];
    }
    if (p.side.inequality && phi == *p.side.inequality) continue;
    if (p.side.nondomination) {
      bool improves = false;
      for (int i = 0; i < p.num_features; ++i) improves |= phi[i] <= (*p.side.nondomination)[i] - 1;
      if (!improves) continue;
    }
    double primary = 0.0, secondary = cost;
    if (p.side.deviation) {
      const Deviation& d = *p.side.deviation;
      for (int i = 0; i < p.num_features; ++i) {
        const double s = d.scale.empty() ? 1.0 : d.scale[i];
        const double dev = s * std::abs(phi[i] - d.reference[i]);
        if (std::isinf(d.weights[i])) primary -= dev;
        else secondary -= d.gamma * d.weights[i] * dev;
      }
    }
    const double tol = 1e-9;
    auto less = [tol](double a, double b) { return a < b - tol * std::max(1.0, std::abs(b)); };
    const bool improves = !best.feasible || less(primary, best.primary) ||
                          (!less(best.primary, primary) && less(secondary, best.secondary));
    if (improves) best = BruteHit{true, sel, primary, secondary};
  }
  return best;
}

}  // namespace machop::testing

#endif  // MACHOP_TESTS_SUPPORT_HPP_
