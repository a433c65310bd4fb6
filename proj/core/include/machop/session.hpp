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

// Append-only session records in JSON lines, and replay of their updates.

#ifndef MACHOP_SESSION_HPP_
#define MACHOP_SESSION_HPP_

#include <fstream>
#include <iosfwd>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "machop/elicit.hpp"

namespace machop {

enum class Phase { kTraining, kEvaluation };
std::string_view to_string(Phase p);

struct SessionHeader {
  std::string session_id;
  ElicitConfig config;
  std::vector<std::string> puzzles;
  std::vector<double> initial_weights;
  NormState initial_norm;
  bool human = false;
  std::string created;  // human sessions only
};

struct IterationRecord {
  IterationLog log;
  std::string timestamp;  // human sessions only
};

// Line 1 is the header, then one "iteration" record per completed query.
// Other record types (evaluation pairs and labels) are kept verbatim.
struct SessionRecord {
  SessionHeader header;
  std::vector<IterationRecord> iterations;
  std::vector<nlohmann::json> events;

  const std::vector<double>& final_weights() const;
};

nlohmann::json header_to_json(const SessionHeader& h);
SessionHeader header_from_json(const nlohmann::json& j);
nlohmann::json iteration_record_to_json(const IterationRecord& rec,
                                        const ClausalCSP* csp = nullptr);

void write_session(std::ostream& out, const SessionRecord& record);
SessionRecord read_session(std::istream& in);
SessionRecord read_session_file(const std::string& path);

SessionRecord make_session_record(std::string session_id, const ElicitConfig& cfg,
                                  const std::vector<Instance>& puzzles,
                                  const ElicitResult& result);

// UTC, ISO 8601 with seconds.
std::string timestamp_now();

// Appends one JSON document per line and flushes after each. An empty path
// disables persistence.
class SessionWriter {
 public:
  SessionWriter() = default;
  explicit SessionWriter(const std::string& path);

  void append(const nlohmann::json& record);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::mutex mu_;
};

struct ReplayResult {
  std::vector<double> weights;
  NormState norm;
  int iterations = 0;
  bool consistent = true;   // every logged snapshot matched bit-for-bit
  int first_mismatch = -1;  // t of the first mismatching iteration
  std::string message;
};

// Re-applies the normalization and weight updates from the logged feature
// vectors and labels, starting from the header state.
ReplayResult replay(const SessionRecord& record);

}  // namespace machop

#endif  // MACHOP_SESSION_HPP_
