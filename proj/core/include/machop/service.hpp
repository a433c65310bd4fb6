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

// HTTP/JSON session service for human labelers.
//
//   POST /sessions                                  create a session
//   GET  /sessions/{id}                             session summary
//   GET  /sessions/{id}/query                       current pair (idempotent)
//   POST /sessions/{id}/label                       {"choice": left|right|indifferent}
//   GET  /sessions/{id}/evaluation?checkpoint=N     learned-vs-reference pairs
//   POST /sessions/{id}/evaluation?checkpoint=N     {"labels": [{"index", "choice"}]}

#ifndef MACHOP_SERVICE_HPP_
#define MACHOP_SERVICE_HPP_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "machop/model.hpp"

namespace machop {

struct ServiceOptions {
  std::vector<std::string> train_puzzles;  // files or directories
  std::vector<std::string> eval_puzzles;
  std::string session_dir;  // empty = keep records in memory only
  double query_timeout_s = 30.0;
};

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpResponse create_session(const nlohmann::json& body);
  HttpResponse get_session(const std::string& id);
  HttpResponse get_query(const std::string& id);
  HttpResponse post_label(const std::string& id, const nlohmann::json& body);
  HttpResponse get_evaluation(const std::string& id, const std::string& checkpoint);
  HttpResponse post_evaluation(const std::string& id, const std::string& checkpoint,
                               const nlohmann::json& body);

  // Binds the socket and returns the port (a free one when `port` is 0).
  int bind(const std::string& host, int port);
  // Serves on the bound socket until stop() is called.
  void listen();
  void stop();

  std::string session_path(const std::string& id) const;

 private:
  struct Session;
  struct Server;

  std::shared_ptr<Session> find(const std::string& id);

  ServiceOptions options_;
  std::map<std::string, Instance> train_;
  std::vector<std::string> train_order_;
  std::map<std::string, Instance> eval_;
  std::vector<std::string> eval_order_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
  std::unique_ptr<Server> server_;
};

// Expands directories into their sorted regular files.
std::vector<std::string> expand_puzzle_paths(const std::vector<std::string>& paths);

}  // namespace machop

#endif  // MACHOP_SERVICE_HPP_
