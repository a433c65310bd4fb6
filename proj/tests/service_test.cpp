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

#include <filesystem>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "machop/elicit.hpp"
#include "machop/service.hpp"
#include "machop/session.hpp"
#include "support.hpp"

namespace machop {
namespace {

using nlohmann::json;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::path(::testing::TempDir()) /
           ("sessions_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    ServiceOptions opts;
    opts.train_puzzles = {testing::data_path("sudoku4/train")};
    opts.eval_puzzles = {testing::data_path("sudoku4/eval")};
    opts.session_dir = dir_.string();
    service_ = std::make_unique<Service>(opts);
  }

  std::string create(const json& cfg) {
    const HttpResponse r = service_->create_session(cfg);
    EXPECT_EQ(r.status, 201) << r.body.dump();
    return r.body.value("session_id", std::string());
  }

  std::filesystem::path dir_;
  std::unique_ptr<Service> service_;
};

TEST_F(ServiceTest, CreateValidatesTheConfig) {
  const std::string a = create({{"strategy", "machop"}, {"normalization", "local"}});
  const std::string b = create({{"strategy", "machop"}, {"normalization", "local"}});
  EXPECT_NE(a, b);
  EXPECT_EQ(service_->create_session({{"strategy", "foo"}}).status, 400);
  EXPECT_EQ(service_->create_session({{"strategy", "machop"}, {"puzzles", {"nope"}}}).status, 400);
  EXPECT_EQ(service_->create_session({{"strategy", "machop"}, {"iterations", 0}}).status, 400);
  EXPECT_TRUE(std::filesystem::exists(service_->session_path(a)));
}

TEST_F(ServiceTest, QueryIsIdempotentUntilLabeled) {
  const std::string id = create({{"strategy", "machop"}, {"iterations", 3}});
  EXPECT_EQ(service_->get_query("missing").status, 404);
  const HttpResponse q1 = service_->get_query(id);
  ASSERT_EQ(q1.status, 200) << q1.body.dump();
  const HttpResponse q2 = service_->get_query(id);
  EXPECT_EQ(q1.body, q2.body);
  EXPECT_EQ(q1.body["t"], 1);
  EXPECT_EQ(q1.body["T"], 3);

  std::vector<int> phi1, phi2;
  for (const auto& f : q1.body["left"]["features"]) phi1.push_back(f["value"]);
  for (const auto& f : q1.body["right"]["features"]) phi2.push_back(f["value"]);
  EXPECT_NE(phi1, phi2);
  bool improves = false;
  for (std::size_t i = 0; i < phi1.size(); ++i) improves |= phi2[i] < phi1[i];
  EXPECT_TRUE(improves || q1.body["relaxed"].get<bool>());
  EXPECT_EQ(q1.body["left"]["grid"].size(), 4u);
}

TEST_F(ServiceTest, LabelFlow) {
  const std::string id = create({{"strategy", "machop"}, {"iterations", 2}});
  EXPECT_EQ(service_->post_label(id, {{"choice", "left"}}).status, 409);
  ASSERT_EQ(service_->get_query(id).status, 200);
  EXPECT_EQ(service_->post_label(id, {{"choice", "sideways"}}).status, 400);
  const HttpResponse r = service_->post_label(id, {{"choice", "indifferent"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["t"], 1);
  EXPECT_EQ(r.body["weights"].get<std::vector<double>>(), std::vector<double>(kNumFeatures, 1.0));
  EXPECT_EQ(service_->post_label(id, {{"choice", "left"}}).status, 409);

  ASSERT_EQ(service_->get_query(id).status, 200);
  ASSERT_EQ(service_->post_label(id, {{"choice", "left"}}).status, 200);
  EXPECT_EQ(service_->get_query(id).status, 410);
  EXPECT_EQ(service_->get_session(id).body["phase"], "evaluation");
}

TEST_F(ServiceTest, LeftLabelMatchesTheUpdateRule) {
  const std::string id = create({{"strategy", "choice_perceptron"}, {"normalization", "none"},
                                 {"iterations", 1}});
  const HttpResponse q = service_->get_query(id);
  ASSERT_EQ(q.status, 200);
  std::vector<double> plus, minus;
  for (const auto& f : q.body["left"]["features"]) plus.push_back(f["value"]);
  for (const auto& f : q.body["right"]["features"]) minus.push_back(f["value"]);
  const HttpResponse r = service_->post_label(id, {{"choice", "left"}});
  EXPECT_EQ(r.body["weights"].get<std::vector<double>>(),
            update_weights(std::vector<double>(kNumFeatures, 1.0), plus, minus, 0.1));
}

TEST_F(ServiceTest, EvaluationCheckpoint) {
  const std::string id = create({{"strategy", "machop"}, {"iterations", 10}, {"seed", 5}});
  EXPECT_EQ(service_->get_evaluation(id, "10").status, 404);
  for (int k = 0; k < 10; ++k) {
    ASSERT_EQ(service_->get_query(id).status, 200);
    ASSERT_EQ(service_->post_label(id, {{"choice", k % 3 == 0 ? "right" : "left"}}).status, 200);
  }
  EXPECT_EQ(service_->get_evaluation(id, "abc").status, 400);
  EXPECT_EQ(service_->get_evaluation(id, "30").status, 404);
  EXPECT_EQ(service_->post_evaluation(id, "10", {{"index", 0}, {"choice", "left"}}).status, 404);
  const HttpResponse ev = service_->get_evaluation(id, "10");
  ASSERT_EQ(ev.status, 200) << ev.body.dump();
  const auto& pairs = ev.body["pairs"];
  ASSERT_FALSE(pairs.empty());
  EXPECT_EQ(service_->get_evaluation(id, "10").body, ev.body);
  // Nothing in the payload names the reference side.
  for (const auto& p : pairs) {
    for (const auto& [key, value] : p.items()) {
      EXPECT_EQ(key.find("ses"), std::string::npos) << key;
      EXPECT_EQ(key.find("learned"), std::string::npos) << key;
    }
  }

  json labels = json::array();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    labels.push_back({{"index", k}, {"choice", k % 3 == 0 ? "left" : k % 3 == 1 ? "right" : "indifferent"}});
  }
  const HttpResponse agg = service_->post_evaluation(id, "10", {{"labels", labels}});
  ASSERT_EQ(agg.status, 200) << agg.body.dump();
  const double total = agg.body["learned_pct"].get<double>() + agg.body["ses_pct"].get<double>() +
                       agg.body["indifferent_pct"].get<double>();
  EXPECT_NEAR(total, 100.0, 1e-9);
  EXPECT_EQ(agg.body["labeled"], pairs.size());
  EXPECT_EQ(service_->post_evaluation(id, "10", {{"index", 999}, {"choice", "left"}}).status, 400);

  // The session file logs each side assignment and the labels.
  const SessionRecord rec = read_session_file(service_->session_path(id));
  EXPECT_EQ(rec.iterations.size(), 10u);
  int pair_records = 0, label_records = 0;
  for (const auto& e : rec.events) {
    if (e["type"] == "evaluation_pairs") {
      ++pair_records;
      for (const auto& p : e["pairs"]) EXPECT_TRUE(p.contains("learned_side"));
    }
    label_records += e["type"] == "evaluation_label";
  }
  EXPECT_EQ(pair_records, 1);
  EXPECT_EQ(label_records, static_cast<int>(pairs.size()));
  EXPECT_TRUE(replay(rec).consistent);
}

TEST_F(ServiceTest, UnitWeightCheckpointMatchesTheReference) {
  const std::string id = create({{"strategy", "machop"}, {"iterations", 1}});
  ASSERT_EQ(service_->get_query(id).status, 200);
  ASSERT_EQ(service_->post_label(id, {{"choice", "indifferent"}}).status, 200);
  const SessionRecord rec = read_session_file(service_->session_path(id));
  ASSERT_EQ(rec.iterations.size(), 1u);
  const HttpResponse ev = service_->get_evaluation(id, "1");
  ASSERT_EQ(ev.status, 200);
  // The weights are unchanged, but the local bounds may have moved; compare
  // the steps' sizes only where the bounds are uniform.
  const auto& ub = rec.iterations[0].log.ub;
  if (std::all_of(ub.begin(), ub.end(), [&](double x) { return x == ub[0]; })) {
    for (const auto& p : ev.body["pairs"]) {
      auto size = [](const json& s) { return s["used_facts"].size() + s["constraints"].size(); };
      EXPECT_GE(size(p["left"]) + size(p["right"]), 2u);
    }
  }
}

TEST_F(ServiceTest, ReplayOfAHumanSessionFile) {
  const std::string id = create({{"strategy", "machop"}, {"iterations", 6}});
  const char* choices[] = {"left", "right", "indifferent", "left", "left", "right"};
  for (const char* c : choices) {
    ASSERT_EQ(service_->get_query(id).status, 200);
    ASSERT_EQ(service_->post_label(id, {{"choice", c}}).status, 200);
  }
  const SessionRecord rec = read_session_file(service_->session_path(id));
  EXPECT_TRUE(rec.header.human);
  ASSERT_EQ(rec.iterations.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) {
    EXPECT_EQ(to_string(rec.iterations[k].log.label), choices[k]);
    EXPECT_FALSE(rec.iterations[k].timestamp.empty());
  }
  const ReplayResult r = replay(rec);
  EXPECT_TRUE(r.consistent) << r.message;
  EXPECT_EQ(r.weights, service_->get_session(id).body["weights"].get<std::vector<double>>());
}

TEST_F(ServiceTest, HttpRoundTrip) {
  const int port = service_->bind("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  std::thread server([this] { service_->listen(); });
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(60, 0);

  auto created = cli.Post("/sessions", R"({"strategy":"machop","iterations":2})", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const std::string id = json::parse(created->body)["session_id"];

  auto bad = cli.Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  auto q = cli.Get("/sessions/" + id + "/query");
  ASSERT_TRUE(q);
  EXPECT_EQ(q->status, 200);
  EXPECT_EQ(q->get_header_value("Content-Type"), "application/json");

  auto label = cli.Post("/sessions/" + id + "/label", R"({"choice":"left"})", "application/json");
  ASSERT_TRUE(label);
  EXPECT_EQ(label->status, 200);
  auto again = cli.Post("/sessions/" + id + "/label", R"({"choice":"left"})", "application/json");
  ASSERT_TRUE(again);
  EXPECT_EQ(again->status, 409);

  auto missing = cli.Get("/sessions/nope/query");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  auto ev = cli.Get("/sessions/" + id + "/evaluation?checkpoint=1");
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->status, 200);
  auto ev_post = cli.Post("/sessions/" + id + "/evaluation?checkpoint=1",
                          R"({"labels":[{"index":0,"choice":"right"}]})", "application/json");
  ASSERT_TRUE(ev_post);
  EXPECT_EQ(ev_post->status, 200);
  EXPECT_EQ(json::parse(ev_post->body)["labeled"], 1);

  auto preflight = cli.Options("/sessions/" + id + "/label");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
  EXPECT_EQ(preflight->get_header_value("Access-Control-Allow-Origin"), "*");
  EXPECT_EQ(q->get_header_value("Access-Control-Allow-Origin"), "*");

  service_->stop();
  server.join();
}

}  // namespace
}  // namespace machop
