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

// Explanation steps, their feature vectors, and the optimal constrained
// unsatisfiable subset (OCUS) search that produces them.

#ifndef MACHOP_EXPLAIN_HPP_
#define MACHOP_EXPLAIN_HPP_

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "machop/hitting_set.hpp"
#include "machop/model.hpp"

namespace machop {

class ExplainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kNumFeatures = 12;

// Feature layout shared by both puzzle families. Slots 3..11 follow the
// category slot of the group (block/row/col or bijectivity/transitivity/clue).
enum FeatureIndex : int {
  kAdjFactsOther = 0,     // Sudoku: other value; logic grid: negative
  kOtherFactsSame = 1,    // Sudoku: same value; logic grid: positive
  kOtherFactsOther = 2,   // Sudoku: other value; logic grid: negative
  kAdjGroups = 3,         // + category slot
  kOtherGroups = 6,       // + category slot
  kAdjFactsFrom = 9,      // + category slot
};

using FeatureVector = std::vector<int>;

const std::vector<std::string>& feature_names(PuzzleKind kind);

struct ExplanationStep {
  Fact target;
  std::vector<Fact> facts;  // sorted by variable
  std::vector<int> groups;  // ascending group id
  FeatureVector features;
};

// The item universe for explaining one target from one set of known facts.
// Item 0 is the negated target, items 1..|given| are the given facts in
// variable order, the remaining items are the constraint groups in id order.
class ExplContext {
 public:
  static constexpr int kNegatedTarget = 0;

  ExplContext(std::shared_ptr<const ClausalCSP> csp, std::vector<Fact> given, Fact target);

  const ClausalCSP& csp() const { return *csp_; }
  const std::vector<Fact>& given() const { return given_; }
  const Fact& target() const { return target_; }

  int num_items() const { return 1 + static_cast<int>(given_.size()) + csp_->num_groups(); }
  int fact_item(int k) const { return 1 + k; }
  int group_item(int g) const { return 1 + static_cast<int>(given_.size()) + g; }
  bool is_fact_item(int j) const { return j >= 1 && j <= static_cast<int>(given_.size()); }
  bool is_group_item(int j) const { return j > static_cast<int>(given_.size()); }
  int group_of_item(int j) const { return j - 1 - static_cast<int>(given_.size()); }
  const Fact& fact_of_item(int j) const { return given_[j - 1]; }

  bool adjacent_group(int g) const { return adjacent_group_[g] != 0; }
  bool adjacent_fact(const Fact& f) const;

  // Feature indices incremented by each item.
  const std::vector<std::vector<int>>& item_features() const { return item_features_; }

  FeatureVector features(const std::vector<int>& items) const;
  std::vector<int> items_of(const ExplanationStep& step) const;
  ExplanationStep make_step(const std::vector<int>& items) const;

  std::string key() const;

 private:
  std::vector<int> fact_features(const Fact& f) const;

  std::shared_ptr<const ClausalCSP> csp_;
  std::vector<Fact> given_;
  Fact target_;
  std::vector<char> adjacent_group_;
  std::vector<std::vector<int>> item_features_;
};

// Features of a step computed from its facts and groups. Throws
// std::invalid_argument when the step uses a fact outside the context.
FeatureVector features(const ExplanationStep& step, const ExplContext& ctx);

// Linear cost model: every non-forced item costs `per_item` plus the sum of
// `per_feature` over the features it increments.
struct ItemCosts {
  double per_item = 0.0;
  std::vector<double> per_feature;

  static ItemCosts unit() { return ItemCosts{1.0, {}}; }
  // Cost w_i / ub_i per feature, scaled by `factor`.
  static ItemCosts weighted(const std::vector<double>& w, const std::vector<double>& ub,
                            double factor = 1.0);
  std::vector<double> for_context(const ExplContext& ctx) const;
};

struct OcusResult {
  bool feasible = false;
  ExplanationStep step;
  Objective objective;
  int iterations = 0;
};

// Explanation engine for one CSP. Caches the correction sets found for each
// (known facts, target) pair so repeated searches over the same state reuse
// them. Not thread-safe; use one engine per session or run.
class Explainer {
 public:
  explicit Explainer(std::shared_ptr<const ClausalCSP> csp);
  ~Explainer();
  Explainer(const Explainer&) = delete;
  Explainer& operator=(const Explainer&) = delete;

  const ClausalCSP& csp() const { return *csp_; }
  std::shared_ptr<const ClausalCSP> csp_ptr() const { return csp_; }

  const ExplContext& context(const std::vector<Fact>& given, const Fact& target);

  // Implicit hitting-set loop. Returns feasible=false when the side
  // constraints admit no explanation; throws ExplainError when the target
  // does not follow from the given facts.
  OcusResult ocus(const std::vector<Fact>& given, const Fact& target,
                  const std::vector<double>& item_costs, const SideConstraints& side = {});
  OcusResult ocus(const std::vector<Fact>& given, const Fact& target, const ItemCosts& costs,
                  const SideConstraints& side = {});

  // Cardinality-minimal step.
  ExplanationStep ses(const std::vector<Fact>& given, const Fact& target);

  // Best step over all targets; ties go to the smallest target variable.
  // Returns feasible=false when no target admits a step under `side`.
  OcusResult best_over_targets(const std::vector<Fact>& given, const std::vector<Fact>& targets,
                               const ItemCosts& costs, const SideConstraints& side = {});

  OcusResult optimal_step(const std::vector<Fact>& given, const std::vector<Fact>& targets,
                          const std::vector<double>& w, const std::vector<double>& ub);

  std::vector<ExplanationStep> sequence(std::vector<Fact> given, std::vector<Fact> targets,
                                        const std::vector<double>& w,
                                        const std::vector<double>& ub);

  std::int64_t sat_calls() const { return sat_calls_; }

 private:
  struct Entry;
  Entry& entry(const std::vector<Fact>& given, const Fact& target);

  std::shared_ptr<const ClausalCSP> csp_;
  std::unique_ptr<Solver> solver_;
  std::vector<Lit> group_selectors_;
  std::map<std::string, std::unique_ptr<Entry>> cache_;
  std::int64_t sat_calls_ = 0;
};

// f_w(phi) = sum_i w_i * phi_i / ub_i. An empty `ub` means all ones.
double utility(const std::vector<double>& w, const std::vector<double>& ub,
               const FeatureVector& phi);

std::vector<Fact> sorted_by_variable(std::vector<Fact> facts);

}  // namespace machop

#endif  // MACHOP_EXPLAIN_HPP_
