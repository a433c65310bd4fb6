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

// Command line entry point: experiments, explanations, the labeling service
// and session replay.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "machop/eval.hpp"
#include "machop/json_io.hpp"
#include "machop/service.hpp"
#include "machop/session.hpp"

namespace {

using nlohmann::json;

machop::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

std::string join(const std::vector<double>& xs) {
  std::ostringstream out;
  out << std::setprecision(6);
  for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? " " : "") << xs[i];
  return out.str();
}

int run_experiment_cmd(const std::string& config_path, const std::string& csv,
                       const std::string& json_out, bool quiet) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open " + config_path);
  const json j = json::parse(in);
  const std::string base = std::filesystem::path(config_path).parent_path().string();
  machop::ExperimentConfig cfg = machop::ExperimentConfig::from_json(j, base);
  if (!csv.empty()) cfg.csv_path = csv;
  if (!json_out.empty()) cfg.json_path = json_out;

  const machop::ExperimentReport report =
      machop::run_experiment(cfg, quiet ? nullptr : &std::cerr);
  if (!cfg.csv_path.empty()) {
    std::ofstream out(cfg.csv_path);
    machop::write_csv(out, report.rows);
  }
  if (!cfg.json_path.empty()) {
    std::ofstream out(cfg.json_path);
    out << machop::to_json(report).dump(2) << '\n';
  }
  std::cout << std::left << std::setw(32) << "cell" << std::right << std::setw(6) << "runs"
            << std::setw(12) << "mean" << std::setw(12) << "std" << std::setw(12) << "median"
            << std::setw(14) << "query_ms" << '\n';
  for (const machop::CellReport& c : report.cells) {
    std::cout << std::left << std::setw(32) << c.name << std::right << std::setw(6)
              << c.regret.count << std::fixed << std::setprecision(4) << std::setw(12)
              << c.regret.mean << std::setw(12) << c.regret.std << std::setw(12)
              << c.regret.median << std::setprecision(2) << std::setw(14)
              << 1000.0 * c.mean_query_time_s << '\n';
    std::cout.unsetf(std::ios::fixed);
  }
  for (const std::string& e : report.errors) std::cerr << "error: " << e << '\n';
  return report.errors.empty() ? 0 : 1;
}

int explain_cmd(const std::string& puzzle, const std::string& weights_path, bool as_json) {
  const machop::LoadedPuzzle lp = machop::load_puzzle_file(puzzle);
  machop::WeightFile wf;
  if (weights_path.empty()) {
    wf.weights.assign(machop::kNumFeatures, 1.0);
  } else {
    wf = machop::read_weight_file(weights_path);
  }
  machop::Explainer ex(lp.csp);
  const auto steps =
      ex.sequence(lp.instance.given, lp.instance.targets, wf.weights, wf.ub);
  const double total = [&] {
    double t = 0.0;
    for (const auto& s : steps) t += machop::utility(wf.weights, wf.ub, s.features);
    return t;
  }();
  if (as_json) {
    json out{{"puzzle", lp.instance.puzzle_id}, {"steps", json::array()}, {"total_cost", total}};
    for (const auto& s : steps) {
      json js = machop::to_json(s, lp.csp.get());
      js["cost"] = machop::utility(wf.weights, wf.ub, s.features);
      out["steps"].push_back(std::move(js));
    }
    std::cout << out.dump(2) << '\n';
    return 0;
  }
  const machop::ClausalCSP& csp = *lp.csp;
  int k = 1;
  for (const auto& s : steps) {
    std::cout << "step " << k++ << ": " << csp.describe(s.target) << "  cost "
              << machop::utility(wf.weights, wf.ub, s.features) << '\n';
    std::cout << "  facts:";
    for (const auto& f : s.facts) std::cout << ' ' << csp.describe(f);
    std::cout << "\n  constraints:";
    for (int g : s.groups) std::cout << ' ' << csp.groups[g].name;
    std::cout << "\n  features:";
    for (int v : s.features) std::cout << ' ' << v;
    std::cout << '\n';
  }
  std::cout << "total cost " << total << " over " << steps.size() << " steps\n";
  return 0;
}

int serve_cmd(const std::string& host, int port, const std::vector<std::string>& train,
              const std::vector<std::string>& eval, const std::string& sessions,
              double timeout) {
  machop::ServiceOptions opts;
  opts.train_puzzles = train;
  opts.eval_puzzles = eval;
  opts.session_dir = sessions;
  opts.query_timeout_s = timeout;
  machop::Service service(opts);
  const int bound = service.bind(host, port);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << host << ':' << bound << ", sessions in "
            << (sessions.empty() ? "memory" : sessions) << std::endl;
  service.listen();
  g_service = nullptr;
  return 0;
}

int replay_cmd(const std::string& path, bool quiet) {
  const machop::SessionRecord rec = machop::read_session_file(path);
  const machop::ReplayResult r = machop::replay(rec);
  if (!quiet) {
    std::cout << "session " << rec.header.session_id << " (" << rec.header.config.strategy
              << ", " << machop::to_string(rec.header.config.normalization) << ")\n";
    for (const auto& it : rec.iterations) {
      std::cout << "t=" << it.log.t << ' ' << machop::to_string(it.log.label) << "  w=["
                << join(it.log.weights) << "]\n";
    }
  }
  std::cout << "replayed " << r.iterations << " iterations\n";
  std::cout << "final weights [" << join(r.weights) << "]\n";
  if (!r.consistent) {
    std::cout << "MISMATCH: " << r.message << '\n';
    return 1;
  }
  std::cout << "weights match the log bit-for-bit\n";
  return 0;
}

int simulate_cmd(const std::vector<std::string>& puzzles, const std::string& config_path,
                 std::uint64_t oracle_seed, double beta, double mislabel, const std::string& out) {
  json cfg_json = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open " + config_path);
    cfg_json = json::parse(in);
  }
  const machop::ElicitConfig cfg = machop::elicit_config_from_json(cfg_json);
  std::vector<machop::Instance> pool;
  for (const auto& p : machop::expand_puzzle_paths(puzzles)) {
    pool.push_back(machop::load_puzzle_file(p).instance);
  }
  machop::OracleUser user = machop::OracleUser::sample(oracle_seed, cfg.seed ^ oracle_seed, beta, mislabel);
  const machop::ElicitResult res = machop::run_elicitation(
      pool, cfg, [&](const machop::Query& q) { return user.respond(q.y1.features, q.y2.features); });
  const machop::SessionRecord rec = machop::make_session_record(
      "sim-" + std::to_string(cfg.seed) + "-" + std::to_string(oracle_seed), cfg, pool, res);
  if (out.empty() || out == "-") {
    machop::write_session(std::cout, rec);
  } else {
    std::ofstream f(out);
    machop::write_session(f, rec);
    std::cerr << "wrote " << rec.iterations.size() << " iterations to " << out << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Step-wise puzzle explanations with interactive preference learning"};
  app.require_subcommand(1);

  auto* experiment = app.add_subcommand("experiment", "Simulated-user experiments");
  experiment->require_subcommand(1);
  auto* run = experiment->add_subcommand("run", "Run an experiment grid from a JSON config");
  std::string config_path, csv, json_out;
  bool quiet = false;
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--csv", csv, "Per-run CSV output (overrides the config)");
  run->add_option("--json", json_out, "Aggregate JSON output (overrides the config)");
  run->add_flag("-q,--quiet", quiet, "No progress output");

  auto* explain = app.add_subcommand("explain", "Print the optimal explanation sequence");
  std::string puzzle, weights;
  bool as_json = false;
  explain->add_option("puzzle", puzzle, "Puzzle file (.txt Sudoku or .lgp logic grid)")
      ->required()
      ->check(CLI::ExistingFile);
  explain->add_option("--weights", weights, "Weight file; unit weights if omitted")
      ->check(CLI::ExistingFile);
  explain->add_flag("--json", as_json, "Emit JSON");

  auto* serve = app.add_subcommand("serve", "Run the HTTP labeling service");
  std::string host = "127.0.0.1", sessions = "sessions";
  int port = 8080;
  double timeout = 30.0;
  std::vector<std::string> train{MACHOP_DEFAULT_TRAIN}, eval{MACHOP_DEFAULT_EVAL};
  serve->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--train", train, "Training puzzle files or directories")->capture_default_str();
  serve->add_option("--eval", eval, "Evaluation puzzle files or directories")->capture_default_str();
  serve->add_option("--sessions", sessions, "Directory for session records")->capture_default_str();
  serve->add_option("--timeout", timeout, "Query generation timeout in seconds")->capture_default_str();

  auto* replay = app.add_subcommand("replay", "Replay a session record and verify its weights");
  std::string session_file;
  replay->add_option("session-file", session_file)->required()->check(CLI::ExistingFile);
  replay->add_flag("-q,--quiet", quiet, "Only print the summary");

  auto* simulate = app.add_subcommand("simulate", "Run one simulated session and write its record");
  std::vector<std::string> sim_puzzles;
  std::string sim_config, sim_out;
  std::uint64_t oracle_seed = 1;
  double beta = 1.0, mislabel = 0.1;
  simulate->add_option("puzzles", sim_puzzles, "Puzzle files or directories")->required();
  simulate->add_option("--config", sim_config, "Elicitation config (JSON)")->check(CLI::ExistingFile);
  simulate->add_option("--oracle-seed", oracle_seed)->capture_default_str();
  simulate->add_option("--beta", beta)->capture_default_str();
  simulate->add_option("--mislabel", mislabel)->capture_default_str();
  simulate->add_option("-o,--out", sim_out, "Output file ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_experiment_cmd(config_path, csv, json_out, quiet);
    if (*explain) return explain_cmd(puzzle, weights, as_json);
    if (*serve) return serve_cmd(host, port, train, eval, sessions, timeout);
    if (*replay) return replay_cmd(session_file, quiet);
    if (*simulate) return simulate_cmd(sim_puzzles, sim_config, oracle_seed, beta, mislabel, sim_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
