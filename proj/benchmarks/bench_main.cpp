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

#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "machop/elicit.hpp"
#include "machop/explain.hpp"
#include "machop/hitting_set.hpp"
#include "machop/model.hpp"
#include "machop/sat.hpp"

namespace machop {
namespace {

std::string data(const std::string& rel) { return std::string(MACHOP_BENCH_DATA_DIR) + "/" + rel; }

// Random 3-SAT near the phase transition.
void BM_SatRandom3Sat(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = static_cast<int>(4.26 * n);
  std::mt19937_64 rng(n);
  std::uniform_int_distribution<int> var(0, n - 1), sign(0, 1);
  std::vector<std::vector<Lit>> clauses(m);
  for (auto& c : clauses) {
    while (c.size() < 3) {
      const Lit l(var(rng), sign(rng) == 1);
      bool clash = false;
      for (Lit o : c) clash |= o.var() == l.var();
      if (!clash) c.push_back(l);
    }
  }
  for (auto _ : state) {
    Solver s(n);
    for (const auto& c : clauses) s.add_clause(c);
    benchmark::DoNotOptimize(s.solve({}).sat());
  }
}
BENCHMARK(BM_SatRandom3Sat)->Arg(50)->Arg(100)->Arg(150)->Unit(benchmark::kMillisecond);

void BM_SudokuSolve(benchmark::State& state) {
  const LoadedPuzzle lp = load_puzzle_file(data("sudoku9/s9_small_01.txt"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(explainable_facts(*lp.csp, lp.instance.given).size());
  }
}
BENCHMARK(BM_SudokuSolve)->Unit(benchmark::kMillisecond);

void BM_HittingSet(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> item(0, n - 1), feature(0, kNumFeatures - 1);
  std::uniform_real_distribution<double> cost(0.1, 5.0);
  HitProblem p;
  p.num_items = n;
  p.num_features = kNumFeatures;
  p.item_costs.resize(n);
  p.item_features.resize(n);
  for (int j = 0; j < n; ++j) {
    p.item_costs[j] = cost(rng);
    p.item_features[j] = {feature(rng)};
  }
  for (int k = 0; k < 2 * n; ++k) {
    std::vector<int> set;
    for (int s = 0; s < 4; ++s) set.push_back(item(rng));
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    p.cover_sets.push_back(set);
  }
  for (auto _ : state) benchmark::DoNotOptimize(solve_min(p).objective.total());
}
BENCHMARK(BM_HittingSet)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMicrosecond);

// Cold OCUS search for one 4x4 target, correction sets not cached.
void BM_OcusSudoku4(benchmark::State& state) {
  const LoadedPuzzle lp = load_puzzle_file(data("sudoku4/train/s4_train_05.txt"));
  const std::vector<double> w(kNumFeatures, 1.0);
  for (auto _ : state) {
    Explainer ex(lp.csp);
    benchmark::DoNotOptimize(
        ex.ocus(lp.instance.given, lp.instance.targets[0], ItemCosts::weighted(w, {})).feasible);
  }
}
BENCHMARK(BM_OcusSudoku4)->Unit(benchmark::kMillisecond);

void BM_OptimalStepSudoku4(benchmark::State& state) {
  const LoadedPuzzle lp = load_puzzle_file(data("sudoku4/train/s4_train_05.txt"));
  const std::vector<double> w = {1, 2, 0.5, 1, 1, 1, 3, 3, 3, 0.2, 0.2, 0.2};
  for (auto _ : state) {
    Explainer ex(lp.csp);
    benchmark::DoNotOptimize(ex.optimal_step(lp.instance.given, lp.instance.targets, w, {}).feasible);
  }
}
BENCHMARK(BM_OptimalStepSudoku4)->Unit(benchmark::kMillisecond);

void BM_SesOrderSudoku4(benchmark::State& state) {
  const LoadedPuzzle lp = load_puzzle_file(data("sudoku4/eval/s4_eval_01.txt"));
  for (auto _ : state) {
    Explainer ex(lp.csp);
    benchmark::DoNotOptimize(ses_order(ex, lp.instance.given, lp.instance.targets).size());
  }
}
BENCHMARK(BM_SesOrderSudoku4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace machop

BENCHMARK_MAIN();
