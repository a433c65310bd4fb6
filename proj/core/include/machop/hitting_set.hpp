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

// Exact 0-1 optimizer for the hitting-set subproblems of the OCUS loop.
//
// A selection x over the items has feature counts
//   phi_i(x) = #{ selected items j : i in features(j) }
// and objective
//   sum_j cost_j x_j  -  gamma * sum_i u_i * s_i * |phi_i(x) - c_i|
// where the deviation term is optional. Features with u_i = +inf are
// optimized first (lexicographically): their unweighted deviation
// sum_i s_i |phi_i - c_i| is maximized before the finite objective is
// considered.

#ifndef MACHOP_HITTING_SET_HPP_
#define MACHOP_HITTING_SET_HPP_

#include <cstdint>
#include <optional>
#include <vector>

namespace machop {

struct Deviation {
  std::vector<int> reference;   // c
  std::vector<double> weights;  // u, entries may be +inf
  std::vector<double> scale;    // s, per-feature multiplier (empty = all ones)
  double gamma = 0.0;
};

struct SideConstraints {
  // Require phi_i(x) <= reference_i - 1 for at least one feature.
  std::optional<std::vector<int>> nondomination;
  // Require phi(x) != reference.
  std::optional<std::vector<int>> inequality;
  std::optional<Deviation> deviation;
};

struct HitProblem {
  int num_items = 0;
  int num_features = 0;
  std::vector<double> item_costs;               // >= 0
  std::vector<std::vector<int>> cover_sets;     // K
  std::vector<int> forced;
  std::vector<std::vector<int>> item_features;  // feature indices per item
  SideConstraints side;
};

// Lexicographic objective: `primary` collects the infinite-weight deviation
// part (always <= 0), `secondary` the finite objective.
struct Objective {
  double primary = 0.0;
  double secondary = 0.0;

  double total() const { return primary + secondary; }
};

bool better(const Objective& a, const Objective& b);

struct HitResult {
  bool feasible = false;
  std::vector<int> selection;  // sorted
  Objective objective;
  std::int64_t nodes = 0;
};

// Validates the problem (throws std::invalid_argument on malformed input).
void validate(const HitProblem& p);

// Feature counts of a selection.
std::vector<int> feature_counts(const HitProblem& p, const std::vector<int>& selection);

// Objective value of a selection, ignoring feasibility.
Objective evaluate(const HitProblem& p, const std::vector<int>& selection);

// True when the selection contains the forced items, hits every cover set,
// and satisfies the non-domination and inequality side constraints.
bool is_feasible(const HitProblem& p, const std::vector<int>& selection);

// Exact branch-and-bound. Branches on the smallest uncovered cover set first,
// then on the remaining items when side constraints or the deviation term
// still depend on them. Among equal optima the first one reached in search
// order is returned, which is deterministic for a given problem.
HitResult solve_min(const HitProblem& p);

}  // namespace machop

#endif  // MACHOP_HITTING_SET_HPP_
