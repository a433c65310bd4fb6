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

#include "machop/explain.hpp"

#include <algorithm>
#include <numeric>

namespace machop {

struct Explainer::Entry {
  ExplContext ctx;
  std::vector<std::vector<int>> corrections;
  bool explainable_checked = false;
};

Explainer::Explainer(std::shared_ptr<const ClausalCSP> csp)
    : csp_(std::move(csp)), solver_(std::make_unique<Solver>(csp_->num_vars())) {
  for (const Clause& c : csp_->base_clauses) solver_->add_clause(c);
  for (const ConstraintGroup& g : csp_->groups) {
    const VarId sel = solver_->new_var();
    for (const Clause& c : g.clauses) {
      std::vector<Lit> guarded = c.lits;
      guarded.push_back(Lit::neg(sel));
      solver_->add_clause(guarded);
    }
    group_selectors_.push_back(Lit::pos(sel));
  }
}

Explainer::~Explainer() = default;

Explainer::Entry& Explainer::entry(const std::vector<Fact>& given, const Fact& target) {
  ExplContext ctx(csp_, given, target);
  std::string key = ctx.key();
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    it = cache_.emplace(std::move(key), std::make_unique<Entry>(Entry{std::move(ctx), {}, false}))
             .first;
  }
  return *it->second;
}

const ExplContext& Explainer::context(const std::vector<Fact>& given, const Fact& target) {
  return entry(given, target).ctx;
}

namespace {

std::vector<SubsetItem> subset_items(const ExplContext& ctx, const std::vector<Lit>& selectors) {
  std::vector<SubsetItem> items(ctx.num_items());
  items[ExplContext::kNegatedTarget].on = {~ctx.target().literal};
  for (std::size_t k = 0; k < ctx.given().size(); ++k) {
    items[ctx.fact_item(static_cast<int>(k))].on = {ctx.given()[k].literal};
  }
  for (const ConstraintGroup& g : ctx.csp().groups) {
    SubsetItem& it = items[ctx.group_item(g.id)];
    it.on = {selectors[g.id]};
    it.off = {~selectors[g.id]};
    it.body = g.clauses;
  }
  return items;
}

std::vector<int> without(const std::vector<int>& sel, int j) {
  std::vector<int> out;
  out.reserve(sel.size());
  for (int x : sel) {
    if (x != j) out.push_back(x);
  }
  return out;
}

}  // namespace

OcusResult Explainer::ocus(const std::vector<Fact>& given, const Fact& target,
                           const ItemCosts& costs, const SideConstraints& side) {
  const ExplContext& ctx = context(given, target);
  return ocus(given, target, costs.for_context(ctx), side);
}

OcusResult Explainer::ocus(const std::vector<Fact>& given, const Fact& target,
                           const std::vector<double>& item_costs, const SideConstraints& side) {
  Entry& e = entry(given, target);
  const ExplContext& ctx = e.ctx;
  SubsetOracle oracle(*solver_, subset_items(ctx, group_selectors_));
  const int n = ctx.num_items();

  if (!e.explainable_checked) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    if (oracle.satisfiable(all)) {
      sat_calls_ += oracle.sat_calls();
      throw ExplainError("fact " + csp_->describe(target) + " does not follow from the known facts");
    }
    e.explainable_checked = true;
  }

  HitProblem hp;
  hp.num_items = n;
  hp.num_features = kNumFeatures;
  hp.item_costs = item_costs;
  hp.cover_sets = e.corrections;
  hp.forced = {ExplContext::kNegatedTarget};
  hp.item_features = ctx.item_features();
  hp.side = side;

  OcusResult out;
  while (true) {
    ++out.iterations;
    const HitResult h = solve_min(hp);
    if (!h.feasible) {
      sat_calls_ += oracle.sat_calls();
      return out;
    }
    if (oracle.satisfiable(h.selection)) {
      const std::vector<int> mss = oracle.grow(h.selection);
      std::vector<int> complement;
      std::vector<char> in(n, 0);
      for (int j : mss) in[j] = 1;
      for (int j = 0; j < n; ++j) {
        if (!in[j]) complement.push_back(j);
      }
      hp.cover_sets.push_back(complement);
      e.corrections.push_back(std::move(complement));
      continue;
    }

    // Deletion-based reduction to a set-minimal core. Items whose removal
    // helps the objective most are tried first.
    std::vector<int> sel = h.selection;
    std::vector<std::pair<Objective, int>> order;
    for (int j : sel) {
      if (j != ExplContext::kNegatedTarget) order.emplace_back(evaluate(hp, without(sel, j)), j);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      if (better(a.first, b.first)) return true;
      if (better(b.first, a.first)) return false;
      return a.second < b.second;
    });
    bool changed = true, blocked = true;
    while (changed && blocked) {
      changed = blocked = false;
      for (const auto& [value, j] : order) {
        if (std::find(sel.begin(), sel.end(), j) == sel.end()) continue;
        std::vector<int> cand = without(sel, j);
        if (oracle.satisfiable(cand)) continue;
        if (side.inequality && ctx.features(cand) == *side.inequality) {
          blocked = true;
          continue;
        }
        sel = std::move(cand);
        changed = true;
      }
    }
    out.feasible = true;
    out.step = ctx.make_step(sel);
    out.objective = evaluate(hp, sel);
    sat_calls_ += oracle.sat_calls();
    return out;
  }
}

ExplanationStep Explainer::ses(const std::vector<Fact>& given, const Fact& target) {
  return ocus(given, target, ItemCosts::unit()).step;
}

OcusResult Explainer::best_over_targets(const std::vector<Fact>& given,
                                        const std::vector<Fact>& targets, const ItemCosts& costs,
                                        const SideConstraints& side) {
  OcusResult best;
  for (const Fact& t : sorted_by_variable(targets)) {
    OcusResult r = ocus(given, t, costs, side);
    if (!r.feasible) continue;
    if (!best.feasible || better(r.objective, best.objective)) best = std::move(r);
  }
  return best;
}

OcusResult Explainer::optimal_step(const std::vector<Fact>& given,
                                   const std::vector<Fact>& targets,
                                   const std::vector<double>& w, const std::vector<double>& ub) {
  if (targets.empty()) throw std::invalid_argument("optimal_step: no targets left");
  OcusResult r = best_over_targets(given, targets, ItemCosts::weighted(w, ub));
  if (!r.feasible) throw ExplainError("optimal_step: no target admits an explanation");
  return r;
}

std::vector<ExplanationStep> Explainer::sequence(std::vector<Fact> given, std::vector<Fact> targets,
                                                 const std::vector<double>& w,
                                                 const std::vector<double>& ub) {
  std::vector<ExplanationStep> steps;
  while (!targets.empty()) {
    OcusResult r = optimal_step(given, targets, w, ub);
    given.push_back(r.step.target);
    targets.erase(std::find(targets.begin(), targets.end(), r.step.target));
    steps.push_back(std::move(r.step));
  }
  return steps;
}

}  // namespace machop
