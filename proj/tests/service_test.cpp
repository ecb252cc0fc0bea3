// Copyright 2026 The optdt Authors.
//
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


#include <gtest/gtest.h>

#include <chrono>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "optdt/scenario_io.hpp"
#include "optdt/service.hpp"
#include "support/fixtures.hpp"

namespace optdt {
namespace {

using nlohmann::json;

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    server_ = new httplib::Server;
    service_ = new SolverService;
    service_->mount(*server_);
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = new std::thread([] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }

  static void TearDownTestSuite() {
    server_->stop();
    thread_->join();
    delete thread_;
    delete server_;
    delete service_;
  }

  static httplib::Client client() {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(std::chrono::seconds(60));
    return c;
  }

  static std::pair<int, json> post(const std::string& path, const json& body) {
    auto res = client().Post(path, body.dump(), "application/json");
    if (!res) return {0, json()};
    return {res->status, json::parse(res->body)};
  }

  static json illustrative_doc() {
    return json::parse(read_text_file(fixtures::data_path("scenarios/illustrative.json")));
  }

  static const json& root_node(const json& response) {
    const json& tree = response.at("tree");
    return tree.at("nodes").at(tree.at("root").get<std::size_t>());
  }

  static inline httplib::Server* server_ = nullptr;
  static inline SolverService* service_ = nullptr;
  static inline std::thread* thread_ = nullptr;
  static inline int port_ = 0;
};

TEST_F(ServiceTest, Health) {
  auto res = client().Get("/v1/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body).at("version"), kVersion);
}

TEST_F(ServiceTest, SolveIllustrative) {
  const auto [status, body] = post("/v1/solve", {{"scenario", illustrative_doc()}});
  ASSERT_EQ(status, 200) << body.dump();
  EXPECT_EQ(root_node(body).at("action"), "a1");
  EXPECT_NEAR(body.at("phi").get<double>(), fixtures::kIllustrativePhi, 1e-9);
  EXPECT_NEAR(body.at("phi_raw").get<double>(), fixtures::kIllustrativePhiRaw, 1e-7);
  for (const char* k : {"T_P", "T_FG", "T_RG", "T_DT", "T_total"}) {
    EXPECT_TRUE(body.at("timings").contains(k)) << k;
  }
  const auto& c = body.at("counts");
  EXPECT_LE(c.at("S_DT").get<int>(), c.at("S_RG").get<int>());
  EXPECT_LE(c.at("S_RG").get<int>(), c.at("S_FG").get<int>());
  EXPECT_EQ(c.at("P_root"), 4);
  EXPECT_NO_THROW(tree_document_from_json(body.at("tree")));
}

TEST_F(ServiceTest, MalformedProbabilityNamesAction) {
  json doc = illustrative_doc();
  doc["actions"][1]["outcomes"][0]["probability"] = "0.4";
  doc["actions"][1]["outcomes"][1]["probability"] = "0.5";
  const auto [status, body] = post("/v1/solve", {{"scenario", doc}});
  EXPECT_EQ(status, 400);
  EXPECT_EQ(body.at("error").at("kind"), "validation");
  EXPECT_NE(body.at("error").at("field").get<std::string>().find("a2"), std::string::npos);
}

TEST_F(ServiceTest, ZeroBudgetIsSingleLeaf) {
  const auto [status, body] = post("/v1/solve", {{"scenario", illustrative_doc()}, {"budget", 0}});
  ASSERT_EQ(status, 200);
  EXPECT_EQ(body.at("tree").at("nodes").size(), 1u);
  EXPECT_FALSE(root_node(body).contains("action"));
  EXPECT_EQ(body.at("phi"), 0.0);
}

TEST_F(ServiceTest, BadRequests) {
  auto res = client().Post("/v1/solve", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(post("/v1/solve", {{"scenario", illustrative_doc()}, {"budget", -1}}).first, 400);
  EXPECT_EQ(post("/v1/solve", {{"scenario", illustrative_doc()}, {"colour", 1}}).first, 400);
  const auto [s1, b1] = post("/v1/resolve", {{"scenario", illustrative_doc()},
                                             {"current_state", {0, 0, 0}},
                                             {"remaining_budget", 2}});
  EXPECT_EQ(s1, 400);
  EXPECT_EQ(b1.at("error").at("field"), "current_state");
  EXPECT_EQ(post("/v1/resolve", {{"scenario", illustrative_doc()},
                                 {"current_state", {9, 0, 0, 0, 0, 0, 0}},
                                 {"remaining_budget", 2}})
                .first,
            400);
  const auto [s2, b2] = post("/v1/resolve", {{"scenario", illustrative_doc()},
                                             {"current_state", {0, 0, 0, 0, 0, 0, 0}},
                                             {"remaining_budget", 7}});
  EXPECT_EQ(s2, 400);
  EXPECT_EQ(b2.at("error").at("field"), "remaining_budget");
}

TEST_F(ServiceTest, CapacityIs422) {
  ServiceConfig cfg;
  cfg.node_cap = 10;
  const SolverService small(cfg);
  const auto r = small.solve(json({{"scenario", illustrative_doc()}}).dump());
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(r.body.at("error").at("kind"), "capacity");
}

TEST_F(ServiceTest, ResolveA7) {
  const auto [status, body] = post("/v1/resolve", {{"scenario", illustrative_doc()},
                                                   {"current_state", {2, 0, 2, 2, 1, 0, 0}},
                                                   {"remaining_budget", 2}});
  ASSERT_EQ(status, 200) << body.dump();
  EXPECT_EQ(root_node(body).at("action"), "a7");
  EXPECT_NEAR(root_node(body).at("score").get<double>(), 0.1, 1e-9);
  EXPECT_NEAR(body.at("phi").get<double>(), 0.1, 1e-9);
}

TEST_F(ServiceTest, ResolveAtRootMatchesSolve) {
  const auto [s1, solved] = post("/v1/solve", {{"scenario", illustrative_doc()}});
  const auto [s2, resolved] = post("/v1/resolve", {{"scenario", illustrative_doc()},
                                                   {"current_state", {0, 0, 0, 0, 0, 0, 0}},
                                                   {"remaining_budget", 6}});
  ASSERT_EQ(s1, 200);
  ASSERT_EQ(s2, 200);
  EXPECT_EQ(solved.at("tree"), resolved.at("tree"));
  EXPECT_EQ(solved.at("counts"), resolved.at("counts"));
}

TEST_F(ServiceTest, ResolveExhaustedStateIsLeaf) {
  const auto [status, body] = post("/v1/resolve", {{"scenario", illustrative_doc()},
                                                   {"current_state", {2, 2, 2, 2, 2, 2, 2}},
                                                   {"remaining_budget", 0}});
  ASSERT_EQ(status, 200) << body.dump();
  EXPECT_EQ(body.at("tree").at("nodes").size(), 1u);
  EXPECT_NEAR(body.at("phi").get<double>(), 1.0, 1e-12);
}

TEST_F(ServiceTest, ResolveConsistencyAtEveryNode) {
  const auto [status, solved] = post("/v1/solve", {{"scenario", illustrative_doc()}});
  ASSERT_EQ(status, 200);
  int checked = 0;
  for (const auto& node : solved.at("tree").at("nodes")) {
    if (!node.contains("action")) continue;
    const auto [s, r] = post("/v1/resolve", {{"scenario", illustrative_doc()},
                                             {"current_state", node.at("state")},
                                             {"remaining_budget", node.at("remaining_budget")}});
    ASSERT_EQ(s, 200) << node.dump();
    EXPECT_NEAR(r.at("phi").get<double>(), node.at("score").get<double>(), 1e-9)
        << node.at("key");
    ++checked;
  }
  EXPECT_GT(checked, 5);
}

TEST_F(ServiceTest, CorsHeaders) {
  auto res = client().Get("/v1/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
  auto pre = client().Options("/v1/solve");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_NE(pre->get_header_value("Access-Control-Allow-Methods").find("POST"),
            std::string::npos);
}

TEST_F(ServiceTest, IdenticalRequestsIdenticalTrees) {
  const json req = {{"scenario", illustrative_doc()}, {"tie_break", "random"}, {"seed", 11}};
  const auto a = post("/v1/solve", req);
  const auto b = post("/v1/solve", req);
  ASSERT_EQ(a.first, 200);
  EXPECT_EQ(a.second.at("tree"), b.second.at("tree"));
}

}  // namespace
}  // namespace optdt
