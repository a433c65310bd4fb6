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

#include "machop/hitting_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace machop {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tolerance(double v) { return 1e-9 * std::max(1.0, std::abs(v)); }

bool deviation_active(const HitProblem& p) {
  return p.side.deviation.has_value() && p.side.deviation->gamma > 0.0;
}

double scale_of(const Deviation& d, int i) { return d.scale.empty() ? 1.0 : d.scale[i]; }

class BranchAndBound {
 public:
  explicit BranchAndBound(const HitProblem& p) : p_(p), n_(p.num_items), m_(p.num_features) {
    status_.assign(n_, 0);
    lo_.assign(m_, 0);
    hi_.assign(m_, 0);
    for (int j = 0; j < n_; ++j) {
      for (int i : p_.item_features[j]) ++hi_[i];
    }
    sets_of_.assign(n_, {});
    const int k = static_cast<int>(p_.cover_sets.size());
    hits_.assign(k, 0);
    undecided_.assign(k, 0);
    for (int s = 0; s < k; ++s) {
      for (int j : p_.cover_sets[s]) {
        sets_of_[j].push_back(s);
        ++undecided_[s];
      }
    }
    used_.assign(n_, 0);

    dev_ = deviation_active(p_);
    primary_coef_.assign(m_, 0.0);
    secondary_coef_.assign(m_, 0.0);
    ref_.assign(m_, 0);
    if (dev_) {
      const Deviation& d = *p_.side.deviation;
      for (int i = 0; i < m_; ++i) {
        ref_[i] = d.reference[i];
        if (std::isinf(d.weights[i])) {
          primary_coef_[i] = scale_of(d, i);
          has_primary_ = has_primary_ || primary_coef_[i] > 0.0;
        } else {
          secondary_coef_[i] = d.gamma * d.weights[i] * scale_of(d, i);
        }
      }
    }
    reduced_.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      double r = p_.item_costs[j];
      for (int i : p_.item_features[j]) r -= secondary_coef_[i];
      reduced_[j] = r;
    }
  }

  HitResult run() {
    for (int j : p_.forced) {
      if (status_[j] == 0) include(j);
    }
    search();
    HitResult out;
    out.feasible = found_;
    out.nodes = nodes_;
    if (found_) {
      out.selection = best_selection_;
      out.objective = best_;
    }
    return out;
  }

 private:
  void include(int j) {
    status_[j] = 1;
    cost_ += p_.item_costs[j];
    for (int i : p_.item_features[j]) ++lo_[i];
    for (int s : sets_of_[j]) {
      ++hits_[s];
      --undecided_[s];
    }
  }
  void undo_include(int j) {
    status_[j] = 0;
    cost_ -= p_.item_costs[j];
    for (int i : p_.item_features[j]) --lo_[i];
    for (int s : sets_of_[j]) {
      --hits_[s];
      ++undecided_[s];
    }
  }
  void exclude(int j) {
    status_[j] = -1;
    for (int i : p_.item_features[j]) --hi_[i];
    for (int s : sets_of_[j]) --undecided_[s];
  }
  void undo_exclude(int j) {
    status_[j] = 0;
    for (int i : p_.item_features[j]) ++hi_[i];
    for (int s : sets_of_[j]) ++undecided_[s];
  }

  bool nondomination_possible() const {
    if (!p_.side.nondomination) return true;
    const auto& ref = *p_.side.nondomination;
    for (int i = 0; i < m_; ++i) {
      if (lo_[i] <= ref[i] - 1) return true;
    }
    return false;
  }
  bool inequality_holds() const {
    if (!p_.side.inequality) return true;
    const auto& ref = *p_.side.inequality;
    for (int i = 0; i < m_; ++i) {
      if (lo_[i] != ref[i]) return true;
    }
    return false;
  }
  bool inequality_possible() const {
    if (!p_.side.inequality) return true;
    const auto& ref = *p_.side.inequality;
    for (int i = 0; i < m_; ++i) {
      if (lo_[i] != hi_[i] || lo_[i] != ref[i]) return true;
    }
    return false;
  }

  // Lower bound on the total cost of completing the cover, using disjoint
  // uncovered sets. Returns +inf when some uncovered set cannot be hit.
  double cover_bound(const std::vector<double>& costs, bool clamp_negative) {
    ++epoch_;
    double lb = 0.0;
    for (std::size_t s = 0; s < p_.cover_sets.size(); ++s) {
      if (hits_[s] > 0) continue;
      if (undecided_[s] == 0) return kInf;
      bool disjoint = true;
      double best = kInf;
      for (int j : p_.cover_sets[s]) {
        if (status_[j] != 0) continue;
        if (used_[j] == epoch_) {
          disjoint = false;
          break;
        }
        double c = costs[j];
        if (clamp_negative) c = std::max(c, 0.0);
        best = std::min(best, c);
      }
      if (!disjoint) continue;
      for (int j : p_.cover_sets[s]) {
        if (status_[j] == 0) used_[j] = epoch_;
      }
      lb += best;
    }
    return lb;
  }

  Objective current_value() const {
    Objective v;
    v.secondary = cost_;
    if (dev_) {
      for (int i = 0; i < m_; ++i) {
        const double d = std::abs(lo_[i] - ref_[i]);
        v.primary -= primary_coef_[i] * d;
        v.secondary -= secondary_coef_[i] * d;
      }
    }
    return v;
  }

  // Returns false when the node can be pruned.
  bool bound_allows() {
    const double cover = cover_bound(p_.item_costs, false);
    if (cover == kInf) return false;
    if (!found_) return true;
    Objective lb;
    lb.secondary = cost_ + cover;
    if (dev_) {
      double max_dev_primary = 0.0, max_dev_secondary = 0.0, cur_dev_secondary = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double dmax = std::max(std::abs(lo_[i] - ref_[i]), std::abs(hi_[i] - ref_[i]));
        max_dev_primary += primary_coef_[i] * dmax;
        max_dev_secondary += secondary_coef_[i] * dmax;
        cur_dev_secondary += secondary_coef_[i] * std::abs(lo_[i] - ref_[i]);
      }
      lb.primary = -max_dev_primary;
      const double bound_a = cost_ + cover - max_dev_secondary;
      // |lo + a - c| <= |lo - c| + a: charge each added item its reduced cost.
      double negative_part = 0.0;
      for (int j = 0; j < n_; ++j) {
        if (status_[j] == 0 && reduced_[j] < 0.0) negative_part += reduced_[j];
      }
      const double bound_b =
          cost_ - cur_dev_secondary + negative_part + cover_bound(reduced_, true);
      lb.secondary = std::max(bound_a, bound_b);
    }
    if (lb.primary > best_.primary + tolerance(best_.primary)) return false;
    if (lb.primary >= best_.primary - tolerance(best_.primary) &&
        lb.secondary >= best_.secondary - tolerance(best_.secondary)) {
      return false;
    }
    return true;
  }

  void consider_current() {
    if (!nondomination_possible() || !inequality_holds()) return;
    const Objective v = current_value();
    if (!found_ || better(v, best_)) {
      found_ = true;
      best_ = v;
      best_selection_.clear();
      for (int j = 0; j < n_; ++j) {
        if (status_[j] == 1) best_selection_.push_back(j);
      }
    }
  }

  int pick_uncovered() const {
    int best = -1;
    for (std::size_t s = 0; s < p_.cover_sets.size(); ++s) {
      if (hits_[s] > 0) continue;
      if (best < 0 || undecided_[s] < undecided_[best]) best = static_cast<int>(s);
    }
    return best;
  }

  void search() {
    ++nodes_;
    if (!nondomination_possible() || !inequality_possible()) return;
    if (!bound_allows()) return;

    const int s = pick_uncovered();
    if (s >= 0) {
      std::vector<int> cand;
      for (int j : p_.cover_sets[s]) {
        if (status_[j] == 0) cand.push_back(j);
      }
      std::sort(cand.begin(), cand.end(), [&](int a, int b) {
        if (p_.item_costs[a] != p_.item_costs[b]) return p_.item_costs[a] < p_.item_costs[b];
        return a < b;
      });
      std::vector<int> excluded;
      for (int j : cand) {
        include(j);
        search();
        undo_include(j);
        exclude(j);
        excluded.push_back(j);
      }
      for (auto it = excluded.rbegin(); it != excluded.rend(); ++it) undo_exclude(*it);
      return;
    }

    // Every cover set is hit. Without a deviation term extra items only add
    // cost, so the current selection is the best completion if it is feasible.
    if (!dev_ && nondomination_possible() && inequality_holds()) {
      consider_current();
      return;
    }
    int next = -1;
    for (int j = 0; j < n_; ++j) {
      if (status_[j] == 0 && !p_.item_features[j].empty()) {
        next = j;
        break;
      }
    }
    if (next < 0) {
      consider_current();
      return;
    }
    include(next);
    search();
    undo_include(next);
    exclude(next);
    search();
    undo_exclude(next);
  }

  const HitProblem& p_;
  int n_;
  int m_;
  std::vector<int> status_;
  std::vector<int> lo_, hi_;
  std::vector<std::vector<int>> sets_of_;
  std::vector<int> hits_, undecided_;
  std::vector<std::int64_t> used_;
  std::int64_t epoch_ = 0;
  double cost_ = 0.0;

  bool dev_ = false;
  bool has_primary_ = false;
  std::vector<double> primary_coef_, secondary_coef_, reduced_;
  std::vector<int> ref_;

  bool found_ = false;
  Objective best_;
  std::vector<int> best_selection_;
  std::int64_t nodes_ = 0;
};

}  // namespace

bool better(const Objective& a, const Objective& b) {
  if (a.primary < b.primary - tolerance(b.primary)) return true;
  if (a.primary > b.primary + tolerance(b.primary)) return false;
  return a.secondary < b.secondary - tolerance(b.secondary);
}

void validate(const HitProblem& p) {
  if (p.num_items < 0 || p.num_features < 0) throw std::invalid_argument("negative sizes");
  if (static_cast<int>(p.item_costs.size()) != p.num_items ||
      static_cast<int>(p.item_features.size()) != p.num_items) {
    throw std::invalid_argument("per-item vectors must have num_items entries");
  }
  for (double c : p.item_costs) {
    if (!std::isfinite(c) || c < 0.0) throw std::invalid_argument("item costs must be finite and >= 0");
  }
  auto check_item = [&](int j) {
    if (j < 0 || j >= p.num_items) throw std::invalid_argument("item index out of range");
  };
  for (const auto& s : p.cover_sets) {
    if (s.empty()) throw std::invalid_argument("empty cover set");
    for (int j : s) check_item(j);
  }
  for (int j : p.forced) check_item(j);
  for (const auto& fs : p.item_features) {
    for (int i : fs) {
      if (i < 0 || i >= p.num_features) throw std::invalid_argument("feature index out of range");
    }
  }
  auto check_len = [&](std::size_t n, const char* what) {
    if (static_cast<int>(n) != p.num_features) {
      throw std::invalid_argument(std::string(what) + " must have num_features entries");
    }
  };
  if (p.side.nondomination) check_len(p.side.nondomination->size(), "nondomination reference");
  if (p.side.inequality) check_len(p.side.inequality->size(), "inequality reference");
  if (p.side.deviation) {
    const Deviation& d = *p.side.deviation;
    check_len(d.reference.size(), "deviation reference");
    check_len(d.weights.size(), "deviation weights");
    if (!d.scale.empty()) check_len(d.scale.size(), "deviation scale");
    if (!(d.gamma >= 0.0 && d.gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0,1]");
    for (double u : d.weights) {
      if (std::isnan(u) || u < 0.0) throw std::invalid_argument("deviation weights must be >= 0");
    }
    for (double s : d.scale) {
      if (!std::isfinite(s) || s < 0.0) throw std::invalid_argument("deviation scale must be >= 0");
    }
  }
}

std::vector<int> feature_counts(const HitProblem& p, const std::vector<int>& selection) {
  std::vector<int> phi(p.num_features, 0);
  for (int j : selection) {
    for (int i : p.item_features[j]) ++phi[i];
  }
  return phi;
}

Objective evaluate(const HitProblem& p, const std::vector<int>& selection) {
  Objective v;
  for (int j : selection) v.secondary += p.item_costs[j];
  if (deviation_active(p)) {
    const Deviation& d = *p.side.deviation;
    const auto phi = feature_counts(p, selection);
    for (int i = 0; i < p.num_features; ++i) {
      const double dev = scale_of(d, i) * std::abs(phi[i] - d.reference[i]);
      if (std::isinf(d.weights[i])) v.primary -= dev;
      else v.secondary -= d.gamma * d.weights[i] * dev;
    }
  }
  return v;
}

bool is_feasible(const HitProblem& p, const std::vector<int>& selection) {
  std::vector<char> in(p.num_items, 0);
  for (int j : selection) in[j] = 1;
  for (int j : p.forced) {
    if (!in[j]) return false;
  }
  for (const auto& s : p.cover_sets) {
    if (std::none_of(s.begin(), s.end(), [&](int j) { return in[j] != 0; })) return false;
  }
  const auto phi = feature_counts(p, selection);
  if (p.side.nondomination) {
    const auto& ref = *p.side.nondomination;
    bool improves = false;
    for (int i = 0; i < p.num_features; ++i) improves = improves || phi[i] < ref[i];
    if (!improves) return false;
  }
  if (p.side.inequality && phi == *p.side.inequality) return false;
  return true;
}

HitResult solve_min(const HitProblem& p) {
  validate(p);
  BranchAndBound bb(p);
  return bb.run();
}

}  // namespace machop
