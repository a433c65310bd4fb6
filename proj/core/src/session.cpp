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

#include "machop/session.hpp"

#include <chrono>
#include <ctime>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "machop/json_io.hpp"

namespace machop {

using nlohmann::json;

std::string_view to_string(Phase p) {
  return p == Phase::kTraining ? "training" : "evaluation";
}

const std::vector<double>& SessionRecord::final_weights() const {
  return iterations.empty() ? header.initial_weights : iterations.back().log.weights;
}

json header_to_json(const SessionHeader& h) {
  json j{{"type", "header"},
         {"session_id", h.session_id},
         {"config", to_json(h.config)},
         {"puzzles", h.puzzles},
         {"initial_weights", h.initial_weights},
         {"norm", to_json(h.initial_norm)},
         {"human", h.human}};
  if (!h.created.empty()) j["created"] = h.created;
  return j;
}

SessionHeader header_from_json(const json& j) {
  if (j.value("type", std::string()) != "header") {
    throw std::runtime_error("session record must start with a header");
  }
  SessionHeader h;
  h.session_id = j.at("session_id").get<std::string>();
  h.config = elicit_config_from_json(j.at("config"));
  h.puzzles = j.at("puzzles").get<std::vector<std::string>>();
  h.initial_weights = j.at("initial_weights").get<std::vector<double>>();
  h.initial_norm = norm_from_json(j.at("norm"));
  h.human = j.value("human", false);
  h.created = j.value("created", std::string());
  return h;
}

json iteration_record_to_json(const IterationRecord& rec, const ClausalCSP* csp) {
  json j = to_json(rec.log, csp);
  j["type"] = "iteration";
  if (!rec.timestamp.empty()) j["timestamp"] = rec.timestamp;
  return j;
}

void write_session(std::ostream& out, const SessionRecord& record) {
  out << header_to_json(record.header).dump() << '\n';
  for (const IterationRecord& r : record.iterations) {
    out << iteration_record_to_json(r).dump() << '\n';
  }
  for (const json& e : record.events) out << e.dump() << '\n';
}

SessionRecord read_session(std::istream& in) {
  SessionRecord rec;
  std::string line;
  bool have_header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("session line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!have_header) {
      rec.header = header_from_json(j);
      have_header = true;
      continue;
    }
    if (j.value("type", std::string()) == "iteration") {
      IterationRecord it;
      it.log = iteration_from_json(j);
      it.timestamp = j.value("timestamp", std::string());
      rec.iterations.push_back(std::move(it));
    } else {
      rec.events.push_back(std::move(j));
    }
  }
  if (!have_header) throw std::runtime_error("empty session record");
  return rec;
}

SessionRecord read_session_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open session file " + path);
  return read_session(in);
}

SessionRecord make_session_record(std::string session_id, const ElicitConfig& cfg,
                                  const std::vector<Instance>& puzzles,
                                  const ElicitResult& result) {
  SessionRecord rec;
  rec.header.session_id = std::move(session_id);
  rec.header.config = cfg;
  for (const Instance& p : puzzles) rec.header.puzzles.push_back(p.puzzle_id);
  rec.header.initial_weights = result.initial_weights;
  rec.header.initial_norm = result.initial_norm;
  for (const IterationLog& log : result.log) rec.iterations.push_back({log, ""});
  return rec;
}

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SessionWriter::SessionWriter(const std::string& path) : path_(path) {
  if (path_.empty()) return;
  out_.open(path_, std::ios::app);
  if (!out_) throw std::runtime_error("cannot open session file " + path_);
}

void SessionWriter::append(const json& record) {
  if (path_.empty()) return;
  std::lock_guard<std::mutex> lock(mu_);
  out_ << record.dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("write failed on " + path_);
}

ReplayResult replay(const SessionRecord& record) {
  ReplayResult out;
  out.weights = record.header.initial_weights;
  out.norm = record.header.initial_norm;
  const double eta = record.header.config.eta;
  for (const IterationRecord& it : record.iterations) {
    const IterationLog& log = it.log;
    out.norm.update(log.y1.features, log.y2.features);
    if (log.label != Label::kIndifferent) {
      const bool left = log.label == Label::kLeft;
      const FeatureVector& plus = left ? log.y1.features : log.y2.features;
      const FeatureVector& minus = left ? log.y2.features : log.y1.features;
      out.weights = update_weights(out.weights, out.norm.normalize(plus),
                                   out.norm.normalize(minus), eta);
    }
    ++out.iterations;
    if (out.consistent && (out.weights != log.weights || out.norm.ub != log.ub)) {
      out.consistent = false;
      out.first_mismatch = log.t;
      out.message = "replayed snapshot differs from the log at t=" + std::to_string(log.t);
    }
  }
  return out;
}

}  // namespace machop
