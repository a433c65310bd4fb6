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

// Regret metrics and the simulated-user experiment grid.

#ifndef MACHOP_EVAL_HPP_
#define MACHOP_EVAL_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "machop/elicit.hpp"

namespace machop {

class RegretError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// (f*(y) - f*(y*)) / f*(y*), where y is optimal under (w, ub) and y* under
// the raw true weights. Tiny negative values from rounding are reported as 0.
double relative_regret(Explainer& explainer, const std::vector<Fact>& given,
                       const std::vector<Fact>& targets, const std::vector<double>& w_star,
                       const std::vector<double>& w, const std::vector<double>& ub);

// Mean relative regret over the states visited by `e_star`, the sequence
// that is optimal under `w_star` from the instance's initial state.
double sequential_regret(Explainer& explainer, const Instance& instance,
                         const std::vector<ExplanationStep>& e_star,
                         const std::vector<double>& w_star, const std::vector<double>& w,
                         const std::vector<double>& ub);

struct GridCell {
  std::string name;
  ElicitConfig config;
};

struct ExperimentConfig {
  std::vector<std::string> train_puzzles;  // file paths
  std::vector<std::string> eval_puzzles;
  int oracles = 10;
  int runs = 5;
  int iterations = 100;
  std::uint64_t seed = 1;
  double beta = 1.0;
  double mislabel_rate = 0.1;
  std::vector<GridCell> cells;
  std::string csv_path;
  std::string json_path;

  // Relative puzzle and output paths are resolved against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::string& base_dir = "");
};

// The default grid: both baselines per normalization, the weighting-scheme
// variants, and MACHOP with each instance-selection mode.
std::vector<GridCell> default_grid();

struct RunRow {
  std::string strategy;
  std::string normalization;
  std::string scheme;
  double eta = 0.0;
  std::uint64_t oracle_seed = 0;
  std::uint64_t run_seed = 0;
  std::string puzzle;
  double seq_regret = 0.0;
  double mean_query_time_s = 0.0;
};

struct Summary {
  int count = 0;
  double mean = 0.0;
  double std = 0.0;
  double median = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(std::vector<double> values);

struct CellReport {
  std::string name;
  Summary regret;  // over per-run mean sequential regret
  double mean_query_time_s = 0.0;
  int failures = 0;
};

struct ExperimentReport {
  std::vector<RunRow> rows;
  std::vector<CellReport> cells;
  std::vector<std::string> errors;

  const CellReport* cell(const std::string& name) const;
};

ExperimentReport run_experiment(const ExperimentConfig& cfg, std::ostream* progress = nullptr);

// Recomputes the per-cell aggregates from the raw rows.
std::vector<CellReport> aggregate(const std::vector<RunRow>& rows,
                                  const std::vector<GridCell>& cells);

void write_csv(std::ostream& out, const std::vector<RunRow>& rows);
nlohmann::json to_json(const ExperimentReport& report);

}  // namespace machop

#endif  // MACHOP_EVAL_HPP_
