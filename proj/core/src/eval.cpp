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

#include "machop/eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <ostream>

#include "machop/json_io.hpp"

namespace machop {
namespace {

constexpr double kRegretTolerance = 1e-9;

double regret_from(double f_y, double f_star) {
  if (!(f_star > 0.0)) throw RegretError("optimal true utility is not positive");
  const double r = (f_y - f_star) / f_star;
  if (r < -kRegretTolerance) {
    throw RegretError("negative regret " + std::to_string(r) + ": true optimum is not optimal");
  }
  return std::max(r, 0.0);
}

}  // namespace

double relative_regret(Explainer& explainer, const std::vector<Fact>& given,
                       const std::vector<Fact>& targets, const std::vector<double>& w_star,
                       const std::vector<double>& w, const std::vector<double>& ub) {
  const OcusResult y = explainer.optimal_step(given, targets, w, ub);
  const OcusResult y_star = explainer.optimal_step(given, targets, w_star, {});
  return regret_from(utility(w_star, {}, y.step.features),
                     utility(w_star, {}, y_star.step.features));
}

double sequential_regret(Explainer& explainer, const Instance& instance,
                         const std::vector<ExplanationStep>& e_star,
                         const std::vector<double>& w_star, const std::vector<double>& w,
                         const std::vector<double>& ub) {
  if (e_star.empty()) throw RegretError("empty reference sequence");
  std::vector<Fact> given = instance.given;
  std::vector<Fact> targets = instance.targets;
  double total = 0.0;
  for (const ExplanationStep& star : e_star) {
    const OcusResult y = explainer.optimal_step(given, targets, w, ub);
    total += regret_from(utility(w_star, {}, y.step.features), utility(w_star, {}, star.features));
    given.push_back(star.target);
    targets.erase(std::find(targets.begin(), targets.end(), star.target));
  }
  return total / static_cast<double>(e_star.size());
}

std::vector<GridCell> default_grid() {
  std::vector<GridCell> cells;
  for (Normalization n : {Normalization::kDefault, Normalization::kNone,
                          Normalization::kCumulative, Normalization::kLocal}) {
    for (bool nondom : {false, true}) {
      ElicitConfig cfg = ElicitConfig::preset("choice_perceptron");
      cfg.normalization = n;
      cfg.nondomination = nondom;
      cfg.strategy = nondom ? "nondomination" : "choice_perceptron";
      cfg.eta = default_learning_rate(cfg);
      cells.push_back({cfg.strategy + "/" + std::string(to_string(n)), cfg});
    }
  }
  ElicitConfig learned = ElicitConfig::preset("machop");
  learned.scheme = Scheme::kLearned;
  learned.strategy = "learned_weights";
  learned.eta = default_learning_rate(learned);
  cells.push_back({"learned_weights", learned});
  cells.push_back({"machop", ElicitConfig::preset("machop")});
  ElicitConfig ses = ElicitConfig::preset("machop");
  ses.selection = InstanceSelection::kOfflineSes;
  ses.eta = default_learning_rate(ses);
  cells.push_back({"machop_offline_ses", ses});
  return cells;
}

namespace {

std::vector<std::string> expand_paths(const nlohmann::json& list, const std::string& base_dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  for (const auto& item : list) {
    fs::path p = item.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
    if (fs::is_directory(p)) {
      std::vector<std::string> files;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file()) files.push_back(e.path().string());
      }
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(p.string());
    }
  }
  return out;
}

GridCell parse_cell(const nlohmann::json& j) {
  ElicitConfig cfg = elicit_config_from_json(j);
  GridCell cell{j.value("name", cfg.strategy), cfg};
  cell.config.strategy = cell.name;
  return cell;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const std::string& base_dir) {
  ExperimentConfig cfg;
  cfg.train_puzzles = expand_paths(j.at("train_puzzles"), base_dir);
  cfg.eval_puzzles = expand_paths(j.at("eval_puzzles"), base_dir);
  cfg.oracles = j.value("oracles", cfg.oracles);
  cfg.runs = j.value("runs", cfg.runs);
  cfg.iterations = j.value("iterations", cfg.iterations);
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("oracle")) {
    cfg.beta = j.at("oracle").value("beta", cfg.beta);
    cfg.mislabel_rate = j.at("oracle").value("mislabel_rate", cfg.mislabel_rate);
  }
  if (!j.contains("cells") || (j.at("cells").is_string() && j.at("cells") == "default")) {
    cfg.cells = default_grid();
  } else {
    for (const auto& c : j.at("cells")) cfg.cells.push_back(parse_cell(c));
  }
  for (GridCell& c : cfg.cells) c.config.iterations = cfg.iterations;
  if (j.contains("output")) {
    auto resolve = [&](const std::string& s) {
      std::filesystem::path p = s;
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      return p.string();
    };
    if (j.at("output").contains("csv")) cfg.csv_path = resolve(j.at("output").at("csv"));
    if (j.at("output").contains("json")) cfg.json_path = resolve(j.at("output").at("json"));
  }
  if (cfg.train_puzzles.empty() || cfg.eval_puzzles.empty()) {
    throw std::invalid_argument("experiment needs training and evaluation puzzles");
  }
  if (cfg.oracles < 1 || cfg.runs < 1 || cfg.iterations < 0) {
    throw std::invalid_argument("oracles and runs must be >= 1, iterations >= 0");
  }
  return cfg;
}

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.median = quantile(0.5);
  s.p25 = quantile(0.25);
  s.p75 = quantile(0.75);
  s.min = values.front();
  s.max = values.back();
  return s;
}

const CellReport* ExperimentReport::cell(const std::string& name) const {
  for (const CellReport& c : cells) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<CellReport> aggregate(const std::vector<RunRow>& rows,
                                  const std::vector<GridCell>& cells) {
  std::vector<CellReport> out;
  for (const GridCell& cell : cells) {
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::pair<double, int>> per_run;
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> times;
    for (const RunRow& r : rows) {
      if (r.strategy != cell.name) continue;
      auto& acc = per_run[{r.oracle_seed, r.run_seed}];
      acc.first += r.seq_regret;
      acc.second += 1;
      times[{r.oracle_seed, r.run_seed}] = r.mean_query_time_s;
    }
    std::vector<double> means;
    double time_sum = 0.0;
    for (const auto& [key, acc] : per_run) {
      means.push_back(acc.first / acc.second);
      time_sum += times[key];
    }
    CellReport rep;
    rep.name = cell.name;
    rep.regret = summarize(means);
    rep.mean_query_time_s = per_run.empty() ? 0.0 : time_sum / static_cast<double>(per_run.size());
    out.push_back(rep);
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, std::ostream* progress) {
  std::vector<Instance> train, eval;
  for (const auto& p : cfg.train_puzzles) train.push_back(load_puzzle_file(p).instance);
  for (const auto& p : cfg.eval_puzzles) eval.push_back(load_puzzle_file(p).instance);

  ExperimentReport report;
  std::map<std::pair<int, std::size_t>, std::vector<ExplanationStep>> reference;
  std::map<std::string, int> failures;

  for (int o = 0; o < cfg.oracles; ++o) {
    const std::uint64_t oracle_seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(o);
    const std::vector<double> w_star = sample_true_weights(oracle_seed);
    for (std::size_t p = 0; p < eval.size(); ++p) {
      Explainer ex(eval[p].csp);
      reference[{o, p}] = ex.sequence(eval[p].given, eval[p].targets, w_star, {});
    }
    for (int r = 0; r < cfg.runs; ++r) {
      const std::uint64_t run_seed = oracle_seed * 1000ULL + static_cast<std::uint64_t>(r) + 1;
      for (const GridCell& cell : cfg.cells) {
        try {
          ElicitConfig ecfg = cell.config;
          ecfg.seed = run_seed;
          ecfg.iterations = cfg.iterations;
          OracleUser user(w_star, cfg.beta, cfg.mislabel_rate, run_seed ^ 0x5bd1e995ULL);
          const ElicitResult res = run_elicitation(
              train, ecfg, [&](const Query& q) { return user.respond(q.y1.features, q.y2.features); });
          for (std::size_t p = 0; p < eval.size(); ++p) {
            Explainer ex(eval[p].csp);
            RunRow row;
            row.strategy = cell.name;
            row.normalization = std::string(to_string(ecfg.normalization));
            row.scheme = std::string(to_string(ecfg.scheme));
            row.eta = ecfg.eta;
            row.oracle_seed = oracle_seed;
            row.run_seed = run_seed;
            row.puzzle = eval[p].puzzle_id;
            row.seq_regret =
                sequential_regret(ex, eval[p], reference[{o, p}], w_star, res.weights, res.norm.ub);
            row.mean_query_time_s = res.mean_query_seconds;
            report.rows.push_back(row);
          }
          if (progress) {
            *progress << "oracle " << o << " run " << r << " " << cell.name << " done\n";
            progress->flush();
          }
        } catch (const std::exception& e) {
          ++failures[cell.name];
          report.errors.push_back(cell.name + " oracle " + std::to_string(o) + " run " +
                                  std::to_string(r) + ": " + e.what());
        }
      }
    }
  }
  report.cells = aggregate(report.rows, cfg.cells);
  for (CellReport& c : report.cells) c.failures = failures[c.name];
  return report;
}

void write_csv(std::ostream& out, const std::vector<RunRow>& rows) {
  out << "strategy,normalization,scheme,eta,oracle_seed,run_seed,puzzle,seq_regret,"
         "mean_query_time_s\n";
  out.precision(17);
  for (const RunRow& r : rows) {
    out << r.strategy << ',' << r.normalization << ',' << r.scheme << ',' << r.eta << ','
        << r.oracle_seed << ',' << r.run_seed << ',' << r.puzzle << ',' << r.seq_regret << ','
        << r.mean_query_time_s << '\n';
  }
}

nlohmann::json to_json(const ExperimentReport& report) {
  nlohmann::json j;
  j["cells"] = nlohmann::json::array();
  for (const CellReport& c : report.cells) {
    j["cells"].push_back({{"name", c.name},
                          {"runs", c.regret.count},
                          {"failures", c.failures},
                          {"seq_regret",
                           {{"mean", c.regret.mean},
                            {"std", c.regret.std},
                            {"median", c.regret.median},
                            {"p25", c.regret.p25},
                            {"p75", c.regret.p75},
                            {"min", c.regret.min},
                            {"max", c.regret.max}}},
                          {"mean_query_time_s", c.mean_query_time_s}});
  }
  j["errors"] = report.errors;
  return j;
}

}  // namespace machop
