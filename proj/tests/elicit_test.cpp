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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "machop/elicit.hpp"
#include "machop/json_io.hpp"
#include "support.hpp"

namespace machop {
namespace {

std::vector<Instance> train_pool(int n = 4) {
  std::vector<Instance> pool;
  for (int k = 1; k <= n; ++k) {
    char name[64];
    std::snprintf(name, sizeof name, "sudoku4/train/s4_train_%02d.txt", k);
    pool.push_back(load_puzzle_file(testing::data_path(name)).instance);
  }
  return pool;
}

Responder oracle_responder(std::uint64_t seed) {
  auto user = std::make_shared<OracleUser>(OracleUser::sample(seed, seed + 1));
  return [user](const Query& q) { return user->respond(q.y1.features, q.y2.features); };
}

TEST(Ucb, WorkedExample) {
  UcbStats s;
  s.improved.assign(1, 3);
  s.differ.assign(1, 4);
  const double u = ucb_weights(s, 10)[0];
  EXPECT_DOUBLE_EQ(u, 0.75 + 2.0 * std::sqrt(std::log(10.0) / 4.0));
  EXPECT_NEAR(u, 2.268, 1e-3);
}

TEST(Ucb, UntestedFeatureIsInfinite) {
  UcbStats s;
  s.improved = {0, 1};
  s.differ = {0, 2};
  const auto u = ucb_weights(s, 3);
  EXPECT_TRUE(std::isinf(u[0]));
  EXPECT_TRUE(std::isfinite(u[1]));
}

TEST(Ucb, StatsCountDifferingAndImprovingPairs) {
  const std::vector<PreferencePair> history = {
      {{1, 2, 3}, {2, 2, 1}}, {{0, 5, 3}, {1, 4, 3}}, {{4, 4, 4}, {4, 4, 4}}};
  const UcbStats s = ucb_stats(history, 3);
  EXPECT_EQ(s.differ, (std::vector<int>{2, 1, 1}));
  EXPECT_EQ(s.improved, (std::vector<int>{2, 0, 0}));
}

TEST(Update, WorkedExample) {
  const auto w = update_weights({1, 1}, {0.2, 0}, {0, 0.3}, 0.5);
  EXPECT_DOUBLE_EQ(w[0], 0.9);
  EXPECT_DOUBLE_EQ(w[1], 1.15);
}

TEST(Update, ClipsAtTheFloor) {
  const auto w = update_weights({0.1, 1}, {5, 0}, {0, 0}, 1.0);
  EXPECT_EQ(w[0], kMinWeight);
  EXPECT_EQ(w[1], 1.0);
}

TEST(Config, PresetsAndValidation) {
  const ElicitConfig cp = ElicitConfig::preset("choice_perceptron");
  EXPECT_EQ(cp.scheme, Scheme::kNoWeights);
  EXPECT_FALSE(cp.nondomination);
  const ElicitConfig m = ElicitConfig::preset("machop");
  EXPECT_EQ(m.scheme, Scheme::kUcb);
  EXPECT_TRUE(m.nondomination);
  EXPECT_THROW(ElicitConfig::preset("foo"), std::invalid_argument);
  ElicitConfig bad = m;
  bad.eta = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = m;
  bad.initial_weights = {1.0};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Config, TunedLearningRates) {
  ElicitConfig c = ElicitConfig::preset("choice_perceptron");
  c.normalization = Normalization::kLocal;
  EXPECT_EQ(default_learning_rate(c), 0.5);
  c.normalization = Normalization::kNone;
  EXPECT_EQ(default_learning_rate(c), 0.1);
  c.normalization = Normalization::kCumulative;
  EXPECT_EQ(default_learning_rate(c), 0.5);
  c.normalization = Normalization::kDefault;
  EXPECT_EQ(default_learning_rate(c), 0.1);
  c.nondomination = true;
  EXPECT_EQ(default_learning_rate(c), 0.5);
  c.normalization = Normalization::kLocal;
  EXPECT_EQ(default_learning_rate(c), 10.0);
  ElicitConfig m = ElicitConfig::preset("machop");
  EXPECT_EQ(default_learning_rate(m), 0.5);
  m.selection = InstanceSelection::kOfflineSes;
  EXPECT_EQ(default_learning_rate(m), 10.0);
  m.scheme = Scheme::kLearned;
  EXPECT_EQ(default_learning_rate(m), 5.0);
}

TEST(Elicitation, ZeroIterationsNeverQueries) {
  ElicitConfig cfg = ElicitConfig::preset("machop");
  cfg.iterations = 0;
  int calls = 0;
  const ElicitResult r = run_elicitation(train_pool(1), cfg, [&](const Query&) {
    ++calls;
    return Label::kLeft;
  });
  EXPECT_EQ(calls, 0);
  EXPECT_EQ(r.weights, std::vector<double>(kNumFeatures, 1.0));
}

TEST(Elicitation, IndifferentLabelKeepsWeights) {
  ElicitConfig cfg = ElicitConfig::preset("machop");
  cfg.iterations = 1;
  const ElicitResult r =
      run_elicitation(train_pool(1), cfg, [](const Query&) { return Label::kIndifferent; });
  ASSERT_EQ(r.log.size(), 1u);
  EXPECT_EQ(r.weights, std::vector<double>(kNumFeatures, 1.0));
}

TEST(Elicitation, LeftLabelAppliesThePerceptronUpdate) {
  ElicitConfig cfg = ElicitConfig::preset("choice_perceptron");
  cfg.normalization = Normalization::kNone;
  cfg.eta = default_learning_rate(cfg);
  cfg.iterations = 1;
  const ElicitResult r =
      run_elicitation(train_pool(1), cfg, [](const Query&) { return Label::kLeft; });
  ASSERT_EQ(r.queries.size(), 1u);
  const Query& q = r.queries[0];
  std::vector<double> plus(q.y1.features.begin(), q.y1.features.end());
  std::vector<double> minus(q.y2.features.begin(), q.y2.features.end());
  EXPECT_EQ(r.weights, update_weights(std::vector<double>(kNumFeatures, 1.0), plus, minus, cfg.eta));
}

TEST(Elicitation, LabelWithoutPendingQueryThrows) {
  Elicitor el(ElicitConfig::preset("machop"), train_pool(1));
  EXPECT_THROW(el.label(Label::kLeft), std::logic_error);
  const Query* q = el.next_query();
  ASSERT_NE(q, nullptr);
  EXPECT_EQ(el.next_query(), q);  // pending query is returned again
  el.label(Label::kLeft);
  EXPECT_THROW(el.label(Label::kLeft), std::logic_error);
}

TEST(Elicitation, IdenticalSeedsGiveIdenticalLogs) {
  ElicitConfig cfg = ElicitConfig::preset("machop");
  cfg.iterations = 25;
  cfg.seed = 11;
  const auto pool = train_pool();
  const ElicitResult a = run_elicitation(pool, cfg, oracle_responder(4));
  const ElicitResult b = run_elicitation(pool, cfg, oracle_responder(4));
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t k = 0; k < a.log.size(); ++k) {
    EXPECT_EQ(to_json(a.log[k]).dump(), to_json(b.log[k]).dump());
  }
  EXPECT_EQ(a.weights, b.weights);
}

// Property: every pair differs in features, and with non-domination on,
// unless relaxed, y2 strictly improves some feature of y1.
TEST(ElicitationProperty, QueriesSatisfySideConstraints) {
  for (const char* strategy : {"machop", "choice_perceptron"}) {
    ElicitConfig cfg = ElicitConfig::preset(strategy);
    cfg.iterations = 40;
    cfg.seed = 2;
    const ElicitResult r = run_elicitation(train_pool(), cfg, oracle_responder(8));
    ASSERT_EQ(r.queries.size(), 40u);
    for (const Query& q : r.queries) {
      EXPECT_NE(q.y1.features, q.y2.features);
      if (cfg.nondomination && !q.relaxed) {
        bool improves = false;
        for (int i = 0; i < kNumFeatures; ++i) improves |= q.y2.features[i] < q.y1.features[i];
        EXPECT_TRUE(improves);
      }
    }
  }
}

TEST(ElicitationProperty, UcbStatsMatchTheHistory) {
  ElicitConfig cfg = ElicitConfig::preset("machop");
  cfg.iterations = 30;
  Elicitor el(cfg, train_pool());
  auto respond = oracle_responder(5);
  while (const Query* q = el.next_query()) {
    el.label(respond(*q));
    const UcbStats s = ucb_stats(el.state().history);
    EXPECT_EQ(s.improved, el.state().ucb.improved);
    EXPECT_EQ(s.differ, el.state().ucb.differ);
  }
}

TEST(ElicitationProperty, UntestedFeatureDrivesDiversification) {
  ElicitConfig cfg = ElicitConfig::preset("machop");
  cfg.iterations = 30;
  const ElicitResult r = run_elicitation(train_pool(), cfg, oracle_responder(6));
  int exercised = 0;
  for (const Query& q : r.queries) {
    std::vector<int> untested;
    for (int i = 0; i < kNumFeatures; ++i) {
      if (std::isinf(q.diversification[i])) untested.push_back(i);
    }
    if (untested.empty()) continue;
    ++exercised;
    bool differs = false;
    for (int i : untested) differs |= q.y1.features[i] != q.y2.features[i];
    EXPECT_TRUE(differs) << "t=" << q.t;
  }
  EXPECT_GT(exercised, 0);
}

TEST(Elicitation, OnlineStoresTheFactPreferredByTheUpdatedWeights) {
  ElicitConfig cfg = ElicitConfig::preset("machop");
  cfg.iterations = 6;
  Elicitor el(cfg, train_pool(1));
  auto respond = oracle_responder(7);
  while (const Query* q = el.next_query()) {
    const std::vector<Fact> before = q->targets;
    const Query copy = *q;
    const IterationLog log = el.label(respond(copy));
    const double f1 = utility(log.weights, log.ub, log.y1.features);
    const double f2 = utility(log.weights, log.ub, log.y2.features);
    const Fact stored = f1 <= f2 ? log.y1.target : log.y2.target;
    if (el.done()) break;
    const Query* next = el.next_query();
    if (next && next->puzzle == copy.puzzle && next->targets.size() + 1 == before.size()) {
      EXPECT_EQ(std::find(next->targets.begin(), next->targets.end(), stored), next->targets.end());
      EXPECT_NE(std::find(next->given.begin(), next->given.end(), stored), next->given.end());
    }
  }
}

TEST(Elicitation, OfflineSelectionUsesOneTargetPerQuery) {
  for (InstanceSelection sel : {InstanceSelection::kOfflineRandom, InstanceSelection::kOfflineSes}) {
    ElicitConfig cfg = ElicitConfig::preset("machop");
    cfg.selection = sel;
    cfg.eta = default_learning_rate(cfg);
    cfg.iterations = 8;
    const ElicitResult r = run_elicitation(train_pool(2), cfg, oracle_responder(3));
    for (const Query& q : r.queries) {
      EXPECT_EQ(q.targets.size(), 1u);
      EXPECT_EQ(q.y1.target, q.targets[0]);
    }
  }
}

// The greedy order picks, at each position, a fact with the smallest
// cardinality-minimal explanation; ties go to the smallest variable.
TEST(SesOrder, GreedySmallestStepFirst) {
  const Instance inst = train_pool(1)[0];
  Explainer ex(inst.csp);
  const auto order = ses_order(ex, inst.given, inst.targets);
  ASSERT_EQ(order.size(), inst.targets.size());
  std::vector<Fact> given = inst.given;
  std::vector<Fact> rest = inst.targets;
  for (const Fact& f : order) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    int best_var = -1;
    for (const Fact& t : sorted_by_variable(rest)) {
      const ExplContext& ctx = ex.context(given, t);
      std::vector<double> unit(ctx.num_items(), 1.0);
      unit[0] = 0.0;
      const auto size = static_cast<std::size_t>(testing::brute_force_min_cost(ctx, unit));
      if (size < best) {
        best = size;
        best_var = t.variable;
      }
    }
    EXPECT_EQ(f.variable, best_var);
    given.push_back(f);
    rest.erase(std::find(rest.begin(), rest.end(), f));
  }
}

TEST(Scheme, ParseAndPrint) {
  for (Scheme s : {Scheme::kNoWeights, Scheme::kLearned, Scheme::kUcb}) {
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  for (InstanceSelection s : {InstanceSelection::kOnline, InstanceSelection::kOfflineRandom,
                              InstanceSelection::kOfflineSes}) {
    EXPECT_EQ(parse_selection(to_string(s)), s);
  }
  EXPECT_THROW(parse_scheme("x"), std::invalid_argument);
  EXPECT_THROW(parse_selection("x"), std::invalid_argument);
}

}  // namespace
}  // namespace machop
