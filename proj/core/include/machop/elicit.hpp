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

// Interactive preference elicitation over explanation steps: instance
// selection, query generation, and perceptron-style weight updates.

#ifndef MACHOP_ELICIT_HPP_
#define MACHOP_ELICIT_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "machop/explain.hpp"
#include "machop/normalize.hpp"
#include "machop/oracle.hpp"

namespace machop {

// How the diversification term weighs each feature.
enum class Scheme { kNoWeights, kLearned, kUcb };
enum class InstanceSelection { kOnline, kOfflineRandom, kOfflineSes };

std::string_view to_string(Scheme s);
std::string_view to_string(InstanceSelection s);
Scheme parse_scheme(std::string_view s);
InstanceSelection parse_selection(std::string_view s);

struct ElicitConfig {
  std::string strategy = "machop";
  Scheme scheme = Scheme::kUcb;
  bool nondomination = true;
  Normalization normalization = Normalization::kLocal;
  InstanceSelection selection = InstanceSelection::kOnline;
  double eta = 0.5;
  int iterations = 100;
  std::uint64_t seed = 0;
  std::vector<double> initial_weights;  // empty = all ones

  // "choice_perceptron" (no weights, no non-domination) or "machop" (UCB
  // weights with non-domination). Throws std::invalid_argument otherwise.
  static ElicitConfig preset(std::string_view strategy);
  void validate() const;
};

// Learning rates tuned for Sudoku, by normalization and method.
double default_learning_rate(const ElicitConfig& cfg);

struct PreferencePair {
  FeatureVector preferred;
  FeatureVector rejected;
};

struct UcbStats {
  std::vector<int> improved;  // pairs where the preferred step has the lower count
  std::vector<int> differ;    // pairs where the counts differ
};

UcbStats ucb_stats(const std::vector<PreferencePair>& history, int num_features = kNumFeatures);
// u_i = q_i + 2 sqrt(ln |Q| / N_i), +inf when N_i = 0.
std::vector<double> ucb_weights(const UcbStats& stats, int num_pairs);

// w + eta * (rejected - preferred), clipped below at 1e-6.
std::vector<double> update_weights(const std::vector<double>& w,
                                   const std::vector<double>& preferred,
                                   const std::vector<double>& rejected, double eta);

inline constexpr double kMinWeight = 1e-6;

struct ElicitationState {
  std::vector<double> w;
  int t = 1;
  std::vector<PreferencePair> history;
  UcbStats ucb;
  NormState norm;
};

struct Query {
  int t = 0;
  int puzzle = 0;
  std::string puzzle_id;
  std::vector<Fact> given;
  std::vector<Fact> targets;
  ExplanationStep y1;
  ExplanationStep y2;
  std::vector<double> diversification;  // u used for y2
  bool relaxed = false;                  // non-domination was dropped for y2
  double seconds = 0.0;
};

// One completed iteration, as persisted in session records.
struct IterationLog {
  int t = 0;
  std::string puzzle_id;
  std::vector<Fact> given;
  std::vector<Fact> targets;
  ExplanationStep y1;
  ExplanationStep y2;
  bool relaxed = false;
  Label label = Label::kIndifferent;
  std::vector<double> ub;       // normalization bounds used for the update
  std::vector<double> weights;  // w after the iteration
};

class Elicitor {
 public:
  Elicitor(ElicitConfig cfg, std::vector<Instance> puzzles);
  ~Elicitor();
  Elicitor(const Elicitor&) = delete;
  Elicitor& operator=(const Elicitor&) = delete;

  const ElicitConfig& config() const { return cfg_; }
  const ElicitationState& state() const { return state_; }
  const std::vector<Instance>& puzzles() const { return puzzles_; }
  bool done() const { return state_.t > cfg_.iterations; }

  // Generates the next query, or returns the pending one. Empty once all
  // iterations are used.
  const Query* next_query();
  const Query* pending() const { return pending_ ? &*pending_ : nullptr; }

  // Applies a label to the pending query. Throws std::logic_error when no
  // query is pending.
  IterationLog label(Label l);

  int skipped() const { return skipped_; }
  int relaxed() const { return relaxed_; }
  double total_query_seconds() const { return total_seconds_; }
  int queries() const { return queries_; }

  Explainer& explainer(int puzzle);

 private:
  struct PuzzleState {
    int puzzle = -1;
    std::vector<Fact> given;
    std::vector<Fact> remaining;
    std::vector<Fact> order;  // offline modes
    std::size_t pos = 0;
  };

  void draw_puzzle();
  std::vector<Fact> current_targets() const;
  void store_fact(const Fact& f);
  std::optional<Query> generate();

  ElicitConfig cfg_;
  std::vector<Instance> puzzles_;
  std::map<int, std::unique_ptr<Explainer>> explainers_;
  ElicitationState state_;
  PuzzleState current_;
  std::mt19937_64 rng_;
  std::optional<Query> pending_;
  int skipped_ = 0;
  int relaxed_ = 0;
  int queries_ = 0;
  double total_seconds_ = 0.0;
};

using Responder = std::function<Label(const Query&)>;

struct ElicitResult {
  std::vector<double> initial_weights;
  NormState initial_norm;
  std::vector<double> weights;
  NormState norm;
  std::vector<IterationLog> log;
  std::vector<Query> queries;
  double mean_query_seconds = 0.0;
  int skipped = 0;
  int relaxed = 0;
};

ElicitResult run_elicitation(const std::vector<Instance>& puzzles, const ElicitConfig& cfg,
                             const Responder& responder);

// Greedy fact order where each next fact has the smallest cardinality step.
std::vector<Fact> ses_order(Explainer& explainer, std::vector<Fact> given,
                            std::vector<Fact> targets);

}  // namespace machop

#endif  // MACHOP_ELICIT_HPP_
