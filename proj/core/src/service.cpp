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

#include "machop/service.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <future>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include <httplib.h>

#include "machop/elicit.hpp"
#include "machop/json_io.hpp"
#include "machop/session.hpp"

namespace machop {

using nlohmann::json;

namespace {

HttpResponse error(int status, const std::string& message) {
  return HttpResponse{status, json{{"error", message}}};
}

struct EvalPair {
  std::vector<Fact> given;
  ExplanationStep learned;
  ExplanationStep reference;
  bool learned_left = true;
  std::optional<Label> choice;
};

struct Evaluation {
  int checkpoint = 0;
  std::string puzzle;
  std::vector<EvalPair> pairs;
};

json aggregate_evaluation(const Evaluation& ev) {
  int learned = 0, reference = 0, indifferent = 0;
  for (const EvalPair& p : ev.pairs) {
    if (!p.choice) continue;
    if (*p.choice == Label::kIndifferent) ++indifferent;
    else if ((*p.choice == Label::kLeft) == p.learned_left) ++learned;
    else ++reference;
  }
  const int n = learned + reference + indifferent;
  auto pct = [n](int k) { return n ? 100.0 * k / n : 0.0; };
  return json{{"checkpoint", ev.checkpoint},
              {"labeled", n},
              {"total", ev.pairs.size()},
              {"learned_pct", pct(learned)},
              {"ses_pct", pct(reference)},
              {"indifferent_pct", pct(indifferent)}};
}

std::optional<int> parse_checkpoint(const std::string& s) {
  if (s.empty() || s.size() > 6 || !std::all_of(s.begin(), s.end(), ::isdigit)) return std::nullopt;
  const int c = std::stoi(s);
  if (c < 1) return std::nullopt;
  return c;
}

}  // namespace

struct Service::Session {
  std::mutex mu;
  std::string id;
  SessionHeader header;
  std::unique_ptr<Elicitor> elicitor;
  std::unique_ptr<SessionWriter> writer;
  std::vector<IterationLog> log;
  std::future<void> inflight;
  Instance eval_puzzle;
  std::map<int, Evaluation> evaluations;

  Phase phase() const { return elicitor->done() ? Phase::kEvaluation : Phase::kTraining; }
};

struct Service::Server {
  httplib::Server http;
};

std::vector<std::string> expand_puzzle_paths(const std::vector<std::string>& paths) {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  for (const std::string& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<std::string> files;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file()) files.push_back(e.path().string());
      }
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  for (const std::string& path : expand_puzzle_paths(options_.train_puzzles)) {
    Instance inst = load_puzzle_file(path).instance;
    train_order_.push_back(inst.puzzle_id);
    train_.emplace(inst.puzzle_id, std::move(inst));
  }
  for (const std::string& path : expand_puzzle_paths(options_.eval_puzzles)) {
    Instance inst = load_puzzle_file(path).instance;
    eval_order_.push_back(inst.puzzle_id);
    eval_.emplace(inst.puzzle_id, std::move(inst));
  }
  if (train_.empty()) throw std::invalid_argument("service needs at least one training puzzle");
  if (!options_.session_dir.empty()) std::filesystem::create_directories(options_.session_dir);
}

Service::~Service() { stop(); }

std::string Service::session_path(const std::string& id) const {
  if (options_.session_dir.empty()) return "";
  return (std::filesystem::path(options_.session_dir) / (id + ".jsonl")).string();
}

std::shared_ptr<Service::Session> Service::find(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

HttpResponse Service::create_session(const json& body) {
  ElicitConfig cfg;
  std::vector<Instance> puzzles;
  Instance eval_puzzle;
  try {
    cfg = elicit_config_from_json(body);
    if (cfg.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    std::vector<std::string> ids = train_order_;
    if (body.contains("puzzles")) ids = body.at("puzzles").get<std::vector<std::string>>();
    if (ids.empty()) throw std::invalid_argument("puzzle set is empty");
    for (const std::string& pid : ids) {
      auto it = train_.find(pid);
      if (it == train_.end()) throw std::invalid_argument("unknown puzzle '" + pid + "'");
      puzzles.push_back(it->second);
    }
    if (body.contains("eval_puzzle")) {
      const std::string pid = body.at("eval_puzzle").get<std::string>();
      auto it = eval_.find(pid);
      if (it == eval_.end()) throw std::invalid_argument("unknown evaluation puzzle '" + pid + "'");
      eval_puzzle = it->second;
    } else if (!eval_order_.empty()) {
      eval_puzzle = eval_.at(eval_order_.front());
    }
  } catch (const std::exception& e) {
    return error(400, e.what());
  }

  auto s = std::make_shared<Session>();
  {
    std::lock_guard<std::mutex> lock(mu_);
    std::random_device rd;
    std::ostringstream id;
    id << 's' << next_id_++ << '-' << std::hex << (static_cast<std::uint64_t>(rd()) << 32 | rd());
    s->id = id.str();
  }
  s->elicitor = std::make_unique<Elicitor>(cfg, puzzles);
  s->eval_puzzle = std::move(eval_puzzle);
  s->header.session_id = s->id;
  s->header.config = cfg;
  for (const Instance& p : puzzles) s->header.puzzles.push_back(p.puzzle_id);
  s->header.initial_weights = s->elicitor->state().w;
  s->header.initial_norm = s->elicitor->state().norm;
  s->header.human = true;
  s->header.created = timestamp_now();
  s->writer = std::make_unique<SessionWriter>(session_path(s->id));
  s->writer->append(header_to_json(s->header));
  {
    std::lock_guard<std::mutex> lock(mu_);
    sessions_[s->id] = s;
  }
  return HttpResponse{201, json{{"session_id", s->id},
                                {"t", 1},
                                {"T", cfg.iterations},
                                {"phase", std::string(to_string(Phase::kTraining))},
                                {"config", to_json(cfg)}}};
}

HttpResponse Service::get_session(const std::string& id) {
  auto s = find(id);
  if (!s) return error(404, "unknown session");
  std::lock_guard<std::mutex> lock(s->mu);
  return HttpResponse{200, json{{"session_id", s->id},
                                {"phase", std::string(to_string(s->phase()))},
                                {"t", s->elicitor->state().t},
                                {"T", s->header.config.iterations},
                                {"labels", s->log.size()},
                                {"weights", s->elicitor->state().w},
                                {"config", to_json(s->header.config)}}};
}

HttpResponse Service::get_query(const std::string& id) {
  auto s = find(id);
  if (!s) return error(404, "unknown session");
  std::lock_guard<std::mutex> lock(s->mu);
  if (!s->inflight.valid()) {
    if (s->elicitor->done()) return error(410, "training complete");
    if (!s->elicitor->pending()) {
      Elicitor* el = s->elicitor.get();
      s->inflight = std::async(std::launch::async, [el] { el->next_query(); });
    }
  }
  if (s->inflight.valid()) {
    const auto timeout = std::chrono::duration<double>(options_.query_timeout_s);
    if (s->inflight.wait_for(timeout) != std::future_status::ready) {
      return error(503, "query generation still running; retry");
    }
    try {
      s->inflight.get();
    } catch (const std::exception& e) {
      return error(500, e.what());
    }
  }
  const Query* q = s->elicitor->pending();
  if (!q) return error(410, "training complete");
  const ClausalCSP& csp = *s->elicitor->puzzles()[q->puzzle].csp;
  return HttpResponse{200, json{{"session_id", s->id},
                                {"t", q->t},
                                {"T", s->header.config.iterations},
                                {"puzzle", q->puzzle_id},
                                {"relaxed", q->relaxed},
                                {"left", render_step(q->y1, csp, q->given)},
                                {"right", render_step(q->y2, csp, q->given)}}};
}

HttpResponse Service::post_label(const std::string& id, const json& body) {
  auto s = find(id);
  if (!s) return error(404, "unknown session");
  Label label;
  try {
    label = parse_label(body.at("choice").get<std::string>());
  } catch (const std::exception& e) {
    return error(400, std::string("choice must be left, right or indifferent: ") + e.what());
  }
  std::lock_guard<std::mutex> lock(s->mu);
  if (s->inflight.valid()) {
    if (s->inflight.wait_for(std::chrono::seconds(0)) != std::future_status::ready) {
      return error(409, "no query is pending");
    }
    try {
      s->inflight.get();
    } catch (const std::exception& e) {
      return error(500, e.what());
    }
  }
  if (!s->elicitor->pending()) return error(409, "no query is pending");
  const Query& q = *s->elicitor->pending();
  const ClausalCSP* csp = s->elicitor->puzzles()[q.puzzle].csp.get();
  IterationRecord rec{s->elicitor->label(label), timestamp_now()};
  s->writer->append(iteration_record_to_json(rec, csp));
  s->log.push_back(rec.log);
  return HttpResponse{200, json{{"t", rec.log.t},
                                {"weights", rec.log.weights},
                                {"phase", std::string(to_string(s->phase()))}}};
}

HttpResponse Service::get_evaluation(const std::string& id, const std::string& checkpoint) {
  auto s = find(id);
  if (!s) return error(404, "unknown session");
  const std::optional<int> c = parse_checkpoint(checkpoint);
  if (!c) return error(400, "checkpoint must be a positive integer");
  std::lock_guard<std::mutex> lock(s->mu);
  if (static_cast<int>(s->log.size()) < *c) return error(404, "no weight snapshot at checkpoint");
  if (!s->eval_puzzle.csp) return error(404, "no evaluation puzzle configured");

  auto it = s->evaluations.find(*c);
  if (it == s->evaluations.end()) {
    const IterationLog& snap = s->log[*c - 1];
    Evaluation ev;
    ev.checkpoint = *c;
    ev.puzzle = s->eval_puzzle.puzzle_id;
    Explainer ex(s->eval_puzzle.csp);
    const std::vector<Fact> order =
        ses_order(ex, s->eval_puzzle.given, s->eval_puzzle.targets);
    std::mt19937_64 rng(s->header.config.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(*c)));
    std::bernoulli_distribution coin(0.5);
    std::vector<Fact> given = sorted_by_variable(s->eval_puzzle.given);
    for (std::size_t k = 0; k < order.size(); ++k) {
      const std::vector<Fact> remaining(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
      EvalPair p;
      p.given = given;
      p.reference = ex.ses(given, order[k]);
      p.learned = ex.optimal_step(given, sorted_by_variable(remaining), snap.weights, snap.ub).step;
      p.learned_left = coin(rng);
      ev.pairs.push_back(std::move(p));
      given = sorted_by_variable([&] {
        auto g = given;
        g.push_back(order[k]);
        return g;
      }());
    }
    json rec{{"type", "evaluation_pairs"}, {"checkpoint", *c}, {"puzzle", ev.puzzle},
             {"timestamp", timestamp_now()}};
    json pairs = json::array();
    for (std::size_t k = 0; k < ev.pairs.size(); ++k) {
      const EvalPair& p = ev.pairs[k];
      const ClausalCSP* csp = s->eval_puzzle.csp.get();
      pairs.push_back(json{{"index", k},
                           {"learned", to_json(p.learned, csp)},
                           {"ses", to_json(p.reference, csp)},
                           {"learned_side", p.learned_left ? "left" : "right"}});
    }
    rec["pairs"] = std::move(pairs);
    s->writer->append(rec);
    it = s->evaluations.emplace(*c, std::move(ev)).first;
  }

  const Evaluation& ev = it->second;
  const ClausalCSP& csp = *s->eval_puzzle.csp;
  json pairs = json::array();
  for (std::size_t k = 0; k < ev.pairs.size(); ++k) {
    const EvalPair& p = ev.pairs[k];
    const ExplanationStep& left = p.learned_left ? p.learned : p.reference;
    const ExplanationStep& right = p.learned_left ? p.reference : p.learned;
    json e{{"index", k},
           {"left", render_step(left, csp, p.given)},
           {"right", render_step(right, csp, p.given)}};
    if (p.choice) e["choice"] = std::string(to_string(*p.choice));
    pairs.push_back(std::move(e));
  }
  return HttpResponse{200, json{{"session_id", s->id},
                                {"checkpoint", ev.checkpoint},
                                {"puzzle", ev.puzzle},
                                {"phase", std::string(to_string(Phase::kEvaluation))},
                                {"pairs", std::move(pairs)}}};
}

HttpResponse Service::post_evaluation(const std::string& id, const std::string& checkpoint,
                                      const json& body) {
  auto s = find(id);
  if (!s) return error(404, "unknown session");
  const std::optional<int> c = parse_checkpoint(checkpoint);
  if (!c) return error(400, "checkpoint must be a positive integer");
  std::vector<std::pair<std::size_t, Label>> labels;
  try {
    const json list = body.contains("labels") ? body.at("labels") : json::array({body});
    for (const auto& l : list) {
      labels.emplace_back(l.at("index").get<std::size_t>(),
                          parse_label(l.at("choice").get<std::string>()));
    }
  } catch (const std::exception& e) {
    return error(400, std::string("bad evaluation labels: ") + e.what());
  }
  std::lock_guard<std::mutex> lock(s->mu);
  auto it = s->evaluations.find(*c);
  if (it == s->evaluations.end()) return error(404, "evaluation not started for checkpoint");
  Evaluation& ev = it->second;
  for (const auto& [index, label] : labels) {
    if (index >= ev.pairs.size()) return error(400, "pair index out of range");
  }
  for (const auto& [index, label] : labels) {
    EvalPair& p = ev.pairs[index];
    p.choice = label;
    const char* preferred = label == Label::kIndifferent           ? "indifferent"
                            : (label == Label::kLeft) == p.learned_left ? "learned"
                                                                         : "ses";
    s->writer->append(json{{"type", "evaluation_label"},
                           {"checkpoint", *c},
                           {"index", index},
                           {"choice", std::string(to_string(label))},
                           {"preferred", preferred},
                           {"timestamp", timestamp_now()}});
  }
  return HttpResponse{200, aggregate_evaluation(ev)};
}

int Service::bind(const std::string& host, int port) {
  if (!server_) {
    server_ = std::make_unique<Server>();
    auto& http = server_->http;
    http.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    auto reply = [](httplib::Response& res, const HttpResponse& r) {
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    auto parse_body = [](const httplib::Request& req) {
      if (req.body.empty()) return json::object();
      return json::parse(req.body);
    };
    auto guarded = [reply](auto fn) {
      return [reply, fn](const httplib::Request& req, httplib::Response& res) {
        try {
          reply(res, fn(req));
        } catch (const json::exception& e) {
          reply(res, error(400, std::string("malformed JSON: ") + e.what()));
        } catch (const std::exception& e) {
          reply(res, error(500, e.what()));
        }
      };
    };
    http.Options(R"(/sessions.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    http.Post("/sessions", guarded([this, parse_body](const httplib::Request& req) {
      return create_session(parse_body(req));
    }));
    http.Get(R"(/sessions/([^/]+))", guarded([this](const httplib::Request& req) {
      return get_session(req.matches[1]);
    }));
    http.Get(R"(/sessions/([^/]+)/query)", guarded([this](const httplib::Request& req) {
      return get_query(req.matches[1]);
    }));
    http.Post(R"(/sessions/([^/]+)/label)", guarded([this, parse_body](const httplib::Request& req) {
      return post_label(req.matches[1], parse_body(req));
    }));
    http.Get(R"(/sessions/([^/]+)/evaluation)", guarded([this](const httplib::Request& req) {
      return get_evaluation(req.matches[1], req.get_param_value("checkpoint"));
    }));
    http.Post(R"(/sessions/([^/]+)/evaluation)",
              guarded([this, parse_body](const httplib::Request& req) {
                return post_evaluation(req.matches[1], req.get_param_value("checkpoint"),
                                       parse_body(req));
              }));
  }
  if (port == 0) {
    const int bound = server_->http.bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!server_->http.bind_to_port(host, port)) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void Service::listen() {
  if (!server_) throw std::logic_error("bind() must be called before listen()");
  server_->http.listen_after_bind();
}

void Service::stop() {
  if (server_) server_->http.stop();
}

}  // namespace machop
