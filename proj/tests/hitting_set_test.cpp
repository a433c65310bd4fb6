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
#include <random>

#include <gtest/gtest.h>

#include "machop/hitting_set.hpp"
#include "support.hpp"

namespace machop {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

HitProblem small_problem() {
  HitProblem p;
  p.num_items = 4;
  p.num_features = 2;
  p.item_costs = {1.0, 2.0, 3.0, 1.5};
  p.item_features = {{0}, {1}, {0, 1}, {}};
  p.cover_sets = {{0, 2}, {1, 2, 3}};
  return p;
}

TEST(HittingSet, PlainWeightedCover) {
  const HitResult r = solve_min(small_problem());
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.selection, (std::vector<int>{0, 3}));
  EXPECT_DOUBLE_EQ(r.objective.secondary, 2.5);
  EXPECT_DOUBLE_EQ(r.objective.primary, 0.0);
}

TEST(HittingSet, ForcedItemsAreKept) {
  HitProblem p = small_problem();
  p.forced = {1};
  const HitResult r = solve_min(p);
  EXPECT_EQ(r.selection, (std::vector<int>{0, 1}));
}

TEST(HittingSet, InequalityExcludesTheReferenceVector) {
  HitProblem p = small_problem();
  p.side.inequality = std::vector<int>{1, 0};  // phi of {0, 3}
  const HitResult r = solve_min(p);
  ASSERT_TRUE(r.feasible);
  EXPECT_NE(feature_counts(p, r.selection), (std::vector<int>{1, 0}));
  EXPECT_DOUBLE_EQ(r.objective.secondary, 3.0);  // {0, 1} or {2}
}

TEST(HittingSet, NondominationNeedsOneStrictImprovement) {
  HitProblem p = small_problem();
  p.side.nondomination = std::vector<int>{1, 1};
  const HitResult r = solve_min(p);
  ASSERT_TRUE(r.feasible);
  const auto phi = feature_counts(p, r.selection);
  EXPECT_TRUE(phi[0] <= 0 || phi[1] <= 0);
  EXPECT_EQ(r.selection, (std::vector<int>{0, 3}));
}

TEST(HittingSet, InfeasibleSideConstraints) {
  HitProblem p = small_problem();
  p.side.nondomination = std::vector<int>{0, 0};
  EXPECT_FALSE(solve_min(p).feasible);
}

TEST(HittingSet, InfiniteDeviationWeightIsOptimizedFirst) {
  HitProblem p = small_problem();
  Deviation d;
  d.reference = {1, 0};
  d.weights = {1.0, kInf};
  d.gamma = 0.5;
  p.side.deviation = d;
  const HitResult r = solve_min(p);
  ASSERT_TRUE(r.feasible);
  // Feature 1 is pushed as far from 0 as possible: items 1 and 2 both count.
  EXPECT_EQ(feature_counts(p, r.selection)[1], 2);
  EXPECT_DOUBLE_EQ(r.objective.primary, -2.0);
}

TEST(HittingSet, BetterIsLexicographic) {
  EXPECT_TRUE(better({-1.0, 100.0}, {0.0, 0.0}));
  EXPECT_FALSE(better({0.0, 0.0}, {-1.0, 100.0}));
  EXPECT_TRUE(better({0.0, 1.0}, {0.0, 2.0}));
  EXPECT_FALSE(better({0.0, 1.0}, {0.0, 1.0 + 1e-12}));
}

TEST(HittingSet, ValidationRejectsMalformedProblems) {
  HitProblem p = small_problem();
  p.item_costs[0] = -1.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = small_problem();
  p.cover_sets.push_back({});
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = small_problem();
  p.cover_sets[0].push_back(9);
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = small_problem();
  p.item_costs[1] = std::nan("");
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = small_problem();
  Deviation d;
  d.reference = {0, 0};
  d.weights = {1.0, 1.0};
  d.gamma = 2.0;
  p.side.deviation = d;
  EXPECT_THROW(validate(p), std::invalid_argument);
}

HitProblem random_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_items(2, 11), n_feat(1, 4), n_sets(0, 6), coin(0, 3);
  std::uniform_real_distribution<double> cost(0.0, 5.0);
  HitProblem p;
  p.num_items = n_items(rng);
  p.num_features = n_feat(rng);
  std::uniform_int_distribution<int> item(0, p.num_items - 1), feat(0, p.num_features - 1);
  for (int j = 0; j < p.num_items; ++j) {
    p.item_costs.push_back(coin(rng) == 0 ? 1.0 : std::round(cost(rng) * 4) / 4);
    std::vector<int> f;
    for (int i = 0; i < p.num_features; ++i) {
      if (coin(rng) == 0) f.push_back(i);
    }
    p.item_features.push_back(f);
  }
  const int sets = n_sets(rng);
  for (int k = 0; k < sets; ++k) {
    std::vector<int> s;
    for (int j = 0; j < p.num_items; ++j) {
      if (coin(rng) == 0) s.push_back(j);
    }
    if (s.empty()) s.push_back(item(rng));
    p.cover_sets.push_back(s);
  }
  if (coin(rng) == 0) p.forced.push_back(item(rng));
  std::uniform_int_distribution<int> ref(0, 3);
  std::vector<int> reference(p.num_features);
  for (int& r : reference) r = ref(rng);
  if (coin(rng) != 0) p.side.inequality = reference;
  if (coin(rng) < 2) p.side.nondomination = reference;
  if (coin(rng) < 2) {
    Deviation d;
    d.reference = reference;
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < p.num_features; ++i) d.weights.push_back(coin(rng) == 0 ? kInf : u(rng));
    if (coin(rng) == 0) {
      for (int i = 0; i < p.num_features; ++i) d.scale.push_back(0.25 + u(rng));
    }
    std::uniform_real_distribution<double> g(0.0, 1.0);
    d.gamma = g(rng);
    p.side.deviation = d;
  }
  return p;
}

// Property: branch and bound reaches the exhaustive optimum.
TEST(HittingSetProperty, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 1500; ++round) {
    const HitProblem p = random_problem(rng);
    const HitResult r = solve_min(p);
    const testing::BruteHit b = testing::brute_force_hitting_set(p);
    ASSERT_EQ(r.feasible, b.feasible) << "round " << round;
    if (!b.feasible) continue;
    EXPECT_TRUE(is_feasible(p, r.selection)) << "round " << round;
    EXPECT_NEAR(r.objective.primary, b.primary, 1e-9) << "round " << round;
    EXPECT_NEAR(r.objective.secondary, b.secondary, 1e-9) << "round " << round;
    const Objective again = evaluate(p, r.selection);
    EXPECT_NEAR(again.primary, r.objective.primary, 1e-9);
    EXPECT_NEAR(again.secondary, r.objective.secondary, 1e-9);
  }
}

TEST(HittingSetProperty, DeterministicAcrossCalls) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 100; ++round) {
    const HitProblem p = random_problem(rng);
    EXPECT_EQ(solve_min(p).selection, solve_min(p).selection);
  }
}

}  // namespace
}  // namespace machop
