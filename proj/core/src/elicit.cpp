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

#include "machop/elicit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace machop {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kNoWeights: return "none";
    case Scheme::kLearned: return "learned";
    case Scheme::kUcb: return "ucb";
  }
  return "none";
}

std::string_view to_string(InstanceSelection s) {
  switch (s) {
    case InstanceSelection::kOnline: return "online";
    case InstanceSelection::kOfflineRandom: return "offline_random";
    case InstanceSelection::kOfflineSes: return "offline_ses";
  }
  return "online";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "none") return Scheme::kNoWeights;
  if (s == "learned") return Scheme::kLearned;
  if (s == "ucb") return Scheme::kUcb;
  throw std::invalid_argument("unknown weighting scheme '" + std::string(s) + "'");
}

InstanceSelection parse_selection(std::string_view s) {
  if (s == "online") return InstanceSelection::kOnline;
  if (s == "offline_random") return InstanceSelection::kOfflineRandom;
  if (s == "offline_ses") return InstanceSelection::kOfflineSes;
  throw std::invalid_argument("unknown instance selection '" + std::string(s) + "'");
}

ElicitConfig ElicitConfig::preset(std::string_view strategy) {
  ElicitConfig cfg;
  cfg.strategy = std::string(strategy);
  if (strategy == "choice_perceptron") {
    cfg.scheme = Scheme::kNoWeights;
    cfg.nondomination = false;
  } else if (strategy == "machop") {
    cfg.scheme = Scheme::kUcb;
    cfg.nondomination = true;
  } else {
    throw std::invalid_argument("unknown strategy '" + std::string(strategy) + "'");
  }
  cfg.eta = default_learning_rate(cfg);
  return cfg;
}

void ElicitConfig::validate() const {
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be positive");
  if (!initial_weights.empty()) {
    if (static_cast<int>(initial_weights.size()) != kNumFeatures) {
      throw std::invalid_argument("initial weights must have one entry per feature");
    }
    for (double w : initial_weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("initial weights must be positive");
    }
  }
}

double default_learning_rate(const ElicitConfig& cfg) {
  switch (cfg.normalization) {
    case Normalization::kDefault: return cfg.nondomination ? 0.5 : 0.1;
    case Normalization::kNone: return 0.1;
    case Normalization::kCumulative: return 0.5;
    case Normalization::kLocal: break;
  }
  switch (cfg.scheme) {
    case Scheme::kNoWeights: return cfg.nondomination ? 10.0 : 0.5;
    case Scheme::kLearned: return 5.0;
    case Scheme::kUcb: return cfg.selection == InstanceSelection::kOnline ? 0.5 : 10.0;
  }
  return 0.5;
}

UcbStats ucb_stats(const std::vector<PreferencePair>& history, int num_features) {
  UcbStats s;
  s.improved.assign(num_features, 0);
  s.differ.assign(num_features, 0);
  for (const PreferencePair& p : history) {
    for (int i = 0; i < num_features; ++i) {
      if (p.preferred[i] != p.rejected[i]) ++s.differ[i];
      if (p.preferred[i] < p.rejected[i]) ++s.improved[i];
    }
  }
  return s;
}

std::vector<double> ucb_weights(const UcbStats& stats, int num_pairs) {
  std::vector<double> u(stats.differ.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (stats.differ[i] == 0) {
      u[i] = std::numeric_limits<double>::infinity();
      continue;
    }
    const double n = stats.differ[i];
    u[i] = stats.improved[i] / n + 2.0 * std::sqrt(std::log(static_cast<double>(num_pairs)) / n);
  }
  return u;
}

std::vector<double> update_weights(const std::vector<double>& w,
                                   const std::vector<double>& preferred,
                                   const std::vector<double>& rejected, double eta) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = std::max(kMinWeight, w[i] + eta * (rejected[i] - preferred[i]));
  }
  return out;
}

Elicitor::Elicitor(ElicitConfig cfg, std::vector<Instance> puzzles)
    : cfg_(std::move(cfg)), puzzles_(std::move(puzzles)), rng_(cfg_.seed) {
  cfg_.validate();
  if (puzzles_.empty()) throw std::invalid_argument("elicitation needs at least one puzzle");
  state_.w = cfg_.initial_weights.empty() ? std::vector<double>(kNumFeatures, 1.0)
                                          : cfg_.initial_weights;
  state_.ucb = ucb_stats({});
  if (cfg_.normalization == Normalization::kDefault) {
    state_.norm = NormState::with_bounds(approximate_upper_bounds(puzzles_));
  } else {
    state_.norm = NormState::make(cfg_.normalization);
  }
}

Elicitor::~Elicitor() = default;

Explainer& Elicitor::explainer(int puzzle) {
  auto& e = explainers_[puzzle];
  if (!e) e = std::make_unique<Explainer>(puzzles_[puzzle].csp);
  return *e;
}

void Elicitor::draw_puzzle() {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(puzzles_.size()) - 1);
  // Bounded retries over puzzles with nothing left to explain.
  for (std::size_t attempt = 0; attempt < 64 * puzzles_.size(); ++attempt) {
    const int p = pick(rng_);
    if (puzzles_[p].targets.empty()) continue;
    current_ = PuzzleState{};
    current_.puzzle = p;
    current_.given = puzzles_[p].given;
    current_.remaining = puzzles_[p].targets;
    if (cfg_.selection == InstanceSelection::kOfflineRandom) {
      current_.order = current_.remaining;
      std::shuffle(current_.order.begin(), current_.order.end(), rng_);
    } else if (cfg_.selection == InstanceSelection::kOfflineSes) {
      current_.order = ses_order(explainer(p), current_.given, current_.remaining);
    }
    return;
  }
  throw std::runtime_error("no puzzle has facts left to explain");
}

std::vector<Fact> Elicitor::current_targets() const {
  if (cfg_.selection == InstanceSelection::kOnline) return current_.remaining;
  return {current_.order[current_.pos]};
}

void Elicitor::store_fact(const Fact& f) {
  current_.given.push_back(f);
  current_.remaining.erase(std::find(current_.remaining.begin(), current_.remaining.end(), f));
  if (cfg_.selection != InstanceSelection::kOnline) ++current_.pos;
}

std::optional<Query> Elicitor::generate() {
  Explainer& ex = explainer(current_.puzzle);
  Query q;
  q.t = state_.t;
  q.puzzle = current_.puzzle;
  q.puzzle_id = puzzles_[current_.puzzle].puzzle_id;
  q.given = sorted_by_variable(current_.given);
  q.targets = current_targets();

  const auto start = std::chrono::steady_clock::now();
  const std::vector<double>& ub = state_.norm.ub;
  OcusResult y1 = ex.optimal_step(q.given, q.targets, state_.w, ub);

  const double gamma = 1.0 / state_.t;
  switch (cfg_.scheme) {
    case Scheme::kNoWeights: q.diversification.assign(kNumFeatures, 1.0); break;
    case Scheme::kLearned: q.diversification = state_.w; break;
    case Scheme::kUcb:
      q.diversification = ucb_weights(state_.ucb, static_cast<int>(state_.history.size()));
      break;
  }
  Deviation dev;
  dev.reference = y1.step.features;
  dev.weights = q.diversification;
  dev.scale.resize(kNumFeatures);
  for (int i = 0; i < kNumFeatures; ++i) dev.scale[i] = 1.0 / ub[i];
  dev.gamma = gamma;

  SideConstraints side;
  side.inequality = y1.step.features;
  side.deviation = dev;
  if (cfg_.nondomination) side.nondomination = y1.step.features;
  const ItemCosts costs = ItemCosts::weighted(state_.w, ub, 1.0 - gamma);

  OcusResult y2 = ex.best_over_targets(q.given, q.targets, costs, side);
  if (!y2.feasible && cfg_.nondomination) {
    side.nondomination.reset();
    y2 = ex.best_over_targets(q.given, q.targets, costs, side);
    q.relaxed = y2.feasible;
  }
  q.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  total_seconds_ += q.seconds;
  if (!y2.feasible) {
    store_fact(y1.step.target);
    return std::nullopt;
  }
  q.y1 = std::move(y1.step);
  q.y2 = std::move(y2.step);
  return q;
}

const Query* Elicitor::next_query() {
  if (pending_) return &*pending_;
  if (done()) return nullptr;
  // Each skip consumes one target, so this terminates within one pass over
  // every puzzle plus a fresh draw.
  std::size_t budget = 1;
  for (const Instance& p : puzzles_) budget += p.targets.size() + 1;
  budget *= 4;
  for (std::size_t attempt = 0; attempt < budget; ++attempt) {
    if (current_.puzzle < 0 || current_.remaining.empty()) draw_puzzle();
    std::optional<Query> q = generate();
    ++queries_;
    if (q) {
      if (q->relaxed) ++relaxed_;
      pending_ = std::move(q);
      return &*pending_;
    }
    ++skipped_;
  }
  throw std::runtime_error("could not generate a query with two distinct explanations");
}

IterationLog Elicitor::label(Label l) {
  if (!pending_) throw std::logic_error("no query is pending");
  Query q = std::move(*pending_);
  pending_.reset();

  state_.norm.update(q.y1.features, q.y2.features);
  if (l != Label::kIndifferent) {
    const bool left = l == Label::kLeft;
    const FeatureVector& plus = left ? q.y1.features : q.y2.features;
    const FeatureVector& minus = left ? q.y2.features : q.y1.features;
    state_.history.push_back({plus, minus});
    for (int i = 0; i < kNumFeatures; ++i) {
      if (plus[i] != minus[i]) ++state_.ucb.differ[i];
      if (plus[i] < minus[i]) ++state_.ucb.improved[i];
    }
    state_.w = update_weights(state_.w, state_.norm.normalize(plus), state_.norm.normalize(minus),
                              cfg_.eta);
  }

  if (cfg_.selection == InstanceSelection::kOnline) {
    const double f1 = utility(state_.w, state_.norm.ub, q.y1.features);
    const double f2 = utility(state_.w, state_.norm.ub, q.y2.features);
    store_fact(f1 <= f2 ? q.y1.target : q.y2.target);
  } else {
    store_fact(q.y1.target);
  }

  IterationLog log;
  log.t = q.t;
  log.puzzle_id = q.puzzle_id;
  log.given = std::move(q.given);
  log.targets = std::move(q.targets);
  log.y1 = std::move(q.y1);
  log.y2 = std::move(q.y2);
  log.relaxed = q.relaxed;
  log.label = l;
  log.ub = state_.norm.ub;
  log.weights = state_.w;
  ++state_.t;
  return log;
}

ElicitResult run_elicitation(const std::vector<Instance>& puzzles, const ElicitConfig& cfg,
                             const Responder& responder) {
  Elicitor el(cfg, puzzles);
  ElicitResult out;
  out.initial_weights = el.state().w;
  out.initial_norm = el.state().norm;
  while (const Query* q = el.next_query()) {
    const Label l = responder(*q);
    out.queries.push_back(*q);
    out.log.push_back(el.label(l));
  }
  out.weights = el.state().w;
  out.norm = el.state().norm;
  out.skipped = el.skipped();
  out.relaxed = el.relaxed();
  out.mean_query_seconds = el.queries() ? el.total_query_seconds() / el.queries() : 0.0;
  return out;
}

std::vector<Fact> ses_order(Explainer& explainer, std::vector<Fact> given,
                            std::vector<Fact> targets) {
  std::vector<Fact> order;
  targets = sorted_by_variable(std::move(targets));
  while (!targets.empty()) {
    std::size_t best = 0, best_size = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const ExplanationStep s = explainer.ses(given, targets[k]);
      const std::size_t size = s.facts.size() + s.groups.size();
      if (size < best_size) {
        best = k;
        best_size = size;
      }
    }
    order.push_back(targets[best]);
    given.push_back(targets[best]);
    targets.erase(targets.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return order;
}

}  // namespace machop
