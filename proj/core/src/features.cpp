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
#include <stdexcept>

#include "machop/explain.hpp"

namespace machop {

const std::vector<std::string>& feature_names(PuzzleKind kind) {
  static const std::vector<std::string> sudoku = {
      "adj_facts_other_value", "other_facts_same_value", "other_facts_other_value",
      "adj_block",             "adj_row",                "adj_col",
      "other_block",           "other_row",              "other_col",
      "adj_facts_from_block",  "adj_facts_from_row",     "adj_facts_from_col"};
  static const std::vector<std::string> grid = {
      "adj_negative_facts",          "other_positive_facts",         "other_negative_facts",
      "adj_bijectivity",             "adj_transitivity",             "adj_clue",
      "other_bijectivity",           "other_transitivity",           "other_clue",
      "adj_facts_from_bijectivity",  "adj_facts_from_transitivity",  "adj_facts_from_clue"};
  return kind == PuzzleKind::kSudoku ? sudoku : grid;
}

std::vector<Fact> sorted_by_variable(std::vector<Fact> facts) {
  std::sort(facts.begin(), facts.end(), [](const Fact& a, const Fact& b) {
    return a.variable != b.variable ? a.variable < b.variable : a.value < b.value;
  });
  return facts;
}

ExplContext::ExplContext(std::shared_ptr<const ClausalCSP> csp, std::vector<Fact> given,
                         Fact target)
    : csp_(std::move(csp)), given_(sorted_by_variable(std::move(given))), target_(target) {
  adjacent_group_.assign(csp_->num_groups(), 0);
  for (int g : csp_->groups_of(target_.variable)) adjacent_group_[g] = 1;

  item_features_.assign(num_items(), {});
  for (std::size_t k = 0; k < given_.size(); ++k) {
    if (given_[k].variable == target_.variable) {
      throw std::invalid_argument("target variable is already known");
    }
    item_features_[fact_item(static_cast<int>(k))] = fact_features(given_[k]);
  }
  for (const ConstraintGroup& g : csp_->groups) {
    const int slot = category_slot(g.category);
    item_features_[group_item(g.id)] = {(adjacent_group(g.id) ? kAdjGroups : kOtherGroups) + slot};
  }
}

bool ExplContext::adjacent_fact(const Fact& f) const {
  const auto& gs = csp_->groups_of(f.variable);
  return std::any_of(gs.begin(), gs.end(), [&](int g) { return adjacent_group(g); });
}

std::vector<int> ExplContext::fact_features(const Fact& f) const {
  std::vector<int> from;
  for (int g : csp_->groups_of(f.variable)) {
    if (adjacent_group(g)) from.push_back(kAdjFactsFrom + category_slot(csp_->groups[g].category));
  }
  std::sort(from.begin(), from.end());
  from.erase(std::unique(from.begin(), from.end()), from.end());
  const bool adjacent = !from.empty();

  std::vector<int> out;
  if (csp_->kind == PuzzleKind::kSudoku) {
    const bool same = f.value == target_.value;
    if (adjacent && same) {
      throw ExplainError("known fact " + csp_->describe(f) + " contradicts target " +
                             csp_->describe(target_));
    }
    if (adjacent) out.push_back(kAdjFactsOther);
    else out.push_back(same ? kOtherFactsSame : kOtherFactsOther);
  } else {
    const bool positive = f.value != 0;
    if (adjacent) {
      if (!positive) out.push_back(kAdjFactsOther);
    } else {
      out.push_back(positive ? kOtherFactsSame : kOtherFactsOther);
    }
  }
  out.insert(out.end(), from.begin(), from.end());
  return out;
}

FeatureVector ExplContext::features(const std::vector<int>& items) const {
  FeatureVector phi(kNumFeatures, 0);
  for (int j : items) {
    for (int i : item_features_.at(j)) ++phi[i];
  }
  return phi;
}

std::vector<int> ExplContext::items_of(const ExplanationStep& step) const {
  std::vector<int> items;
  for (const Fact& f : step.facts) {
    const auto it = std::find(given_.begin(), given_.end(), f);
    if (it == given_.end()) {
      throw std::invalid_argument("step uses fact " + csp_->describe(f) + " that is not known");
    }
    items.push_back(fact_item(static_cast<int>(it - given_.begin())));
  }
  for (int g : step.groups) {
    if (g < 0 || g >= csp_->num_groups()) throw std::invalid_argument("unknown group id");
    items.push_back(group_item(g));
  }
  std::sort(items.begin(), items.end());
  return items;
}

ExplanationStep ExplContext::make_step(const std::vector<int>& items) const {
  ExplanationStep step;
  step.target = target_;
  for (int j : items) {
    if (is_fact_item(j)) step.facts.push_back(fact_of_item(j));
    else if (is_group_item(j)) step.groups.push_back(group_of_item(j));
  }
  step.facts = sorted_by_variable(std::move(step.facts));
  std::sort(step.groups.begin(), step.groups.end());
  step.features = features(items);
  return step;
}

std::string ExplContext::key() const {
  std::string k = std::to_string(target_.variable) + "=" + std::to_string(target_.value) + "|";
  for (const Fact& f : given_) {
    k += std::to_string(f.variable) + ":" + std::to_string(f.value) + ",";
  }
  return k;
}

FeatureVector features(const ExplanationStep& step, const ExplContext& ctx) {
  if (!(step.target == ctx.target())) {
    throw std::invalid_argument("step explains a different fact than the context");
  }
  return ctx.features(ctx.items_of(step));
}

ItemCosts ItemCosts::weighted(const std::vector<double>& w, const std::vector<double>& ub,
                              double factor) {
  ItemCosts c;
  c.per_feature.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double bound = ub.empty() ? 1.0 : ub[i];
    c.per_feature[i] = factor * w[i] / bound;
  }
  return c;
}

std::vector<double> ItemCosts::for_context(const ExplContext& ctx) const {
  std::vector<double> costs(ctx.num_items(), per_item);
  costs[ExplContext::kNegatedTarget] = 0.0;
  if (!per_feature.empty()) {
    for (int j = 1; j < ctx.num_items(); ++j) {
      for (int i : ctx.item_features()[j]) costs[j] += per_feature[i];
    }
  }
  return costs;
}

double utility(const std::vector<double>& w, const std::vector<double>& ub,
               const FeatureVector& phi) {
  double f = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double bound = ub.empty() ? 1.0 : ub[i];
    f += w[i] * phi[i] / bound;
  }
  return f;
}

}  // namespace machop
