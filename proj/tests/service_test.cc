// Copyright 2026 The DCO Authors.
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

#include "dco/service.h"

#include <chrono>

#include <gtest/gtest.h>
#include <httplib.h>

#include "dco/error.h"
#include "dco/hash.h"
#include "demo_env.h"

namespace dco {
namespace {

using nlohmann::json;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override { Boot(); }

  void Boot() {
    service_.reset();
    engine_ = Engine::Create(env_.Config());
    service_ = std::make_unique<Service>(*engine_, ServiceConfig{"127.0.0.1", 0, 5000});
    service_->Start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", service_->port());
    client_->set_read_timeout(30, 0);
  }

  json Body(const httplib::Result& r) {
    EXPECT_TRUE(r);
    return json::parse(r->body);
  }

  httplib::Result Post(const std::string& path, const json& body = json::object()) {
    return client_->Post(path.c_str(), body.dump(), "application/json");
  }

  testing::DemoEnv env_;
  std::unique_ptr<Engine> engine_;
  std::unique_ptr<Service> service_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServiceTest, Health) {
  const auto start = std::chrono::steady_clock::now();
  auto r = client_->Get("/api/health");
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start).count();
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["status"], "ok");
  EXPECT_LT(ms, 100);
  EXPECT_EQ(r->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST_F(ServiceTest, ListAndGetDirectives) {
  json list = Body(client_->Get("/api/directives"));
  ASSERT_EQ(list.size(), 1u);
  EXPECT_EQ(list[0]["id"], "open_file");
  json one = Body(client_->Get("/api/directives/open_file"));
  EXPECT_EQ(one, list[0]);
  EXPECT_EQ(one["version"], 1);
  auto missing = client_->Get("/api/directives/nope");
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body)["error"], ErrorCodeName(ErrorCode::kUnknownDirective));
}

TEST_F(ServiceTest, PutBumpsVersion) {
  auto r = client_->Put("/api/directives/open_file",
                        json({{"text", "Create a function named onOpenDynamic."}}).dump(),
                        "application/json");
  EXPECT_EQ(r->status, 200);
  json d = json::parse(r->body);
  EXPECT_EQ(d["version"], 2);
  EXPECT_EQ(engine_->directives().Get("open_file").version, 2);
  EXPECT_EQ(client_->Put("/api/directives/open_file", "{}", "application/json")->status, 400);
  EXPECT_EQ(client_->Put("/api/directives/open_file", "[1", "application/json")->status, 400);
  EXPECT_EQ(client_->Put("/api/directives/open_file", json({{"text", ""}}).dump(),
                         "application/json")->status, 400);
  EXPECT_EQ(client_->Put("/api/directives/zzz", json({{"text", "x"}}).dump(),
                         "application/json")->status, 404);
}

TEST_F(ServiceTest, InvokeRunsGeneratedCode) {
  auto r = Post("/api/directives/open_file/invoke", {{"args", json::array()}});
  ASSERT_EQ(r->status, 200) << r->body;
  json j = json::parse(r->body);
  EXPECT_EQ(j["outcome"]["status"], "ok");
  EXPECT_EQ(j["block"]["status"], "ready");
  EXPECT_EQ(j["generated"], true);
  EXPECT_NE(j["outcome"]["effects"]["text"].get<std::string>().find("Hello from a file"),
            std::string::npos);
  EXPECT_EQ(j["block"]["source_hash"], Sha256Hex(j["block"]["source"].get<std::string>()));
  // Empty body means no arguments.
  json again = Body(Post("/api/directives/open_file/invoke"));
  EXPECT_EQ(again["generated"], false);
  EXPECT_EQ(engine_->backend().call_count(), 1);
  EXPECT_EQ(Post("/api/directives/open_file/invoke", {{"args", 3}})->status, 400);
  EXPECT_EQ(Post("/api/directives/zzz/invoke")->status, 404);
}

TEST_F(ServiceTest, EditThenInvokeRegenerates) {
  Body(Post("/api/directives/open_file/invoke"));
  const std::string text = engine_->directives().Get("open_file").text;
  client_->Put("/api/directives/open_file",
               json({{"text", text + " " + testing::kWarnSentence}}).dump(), "application/json");
  json j = Body(Post("/api/directives/open_file/invoke"));
  EXPECT_EQ(j["generated"], true);
  EXPECT_EQ(j["block"]["directive_version"], 2);
  EXPECT_NE(j["block"]["source"].get<std::string>().find("showwarning"), std::string::npos);
  EXPECT_EQ(engine_->backend().call_count(), 2);
}

TEST_F(ServiceTest, RegenerateBlocksAndPurge) {
  json b = Body(Post("/api/directives/open_file/regenerate"));
  EXPECT_EQ(b["status"], "ready");
  Body(Post("/api/directives/open_file/regenerate"));
  EXPECT_EQ(Post("/api/directives/zzz/regenerate")->status, 404);
  EXPECT_EQ(Body(client_->Get("/api/blocks")).size(), 2u);
  EXPECT_EQ(Body(client_->Get("/api/blocks?directive=open_file")).size(), 2u);
  EXPECT_EQ(Body(client_->Get("/api/blocks?directive=other")).size(), 0u);
  EXPECT_EQ(Post("/api/purge")->status, 400);
  EXPECT_EQ(Post("/api/purge", {{"scope", "sometimes"}})->status, 400);
  EXPECT_EQ(Body(Post("/api/purge", {{"scope", "failed_only"}}))["purged"], 0);
  EXPECT_EQ(Body(Post("/api/purge", {{"scope", {{"older_than_ms", 3600000}}}}))["purged"], 0);
  EXPECT_EQ(Body(Post("/api/purge", {{"scope", "all"}}))["purged"], 2);
  EXPECT_TRUE(Body(client_->Get("/api/blocks")).empty());
}

TEST_F(ServiceTest, RestartRestoresCachedBlock) {
  Body(Post("/api/directives/open_file/invoke"));
  Boot();
  EXPECT_EQ(engine_->restored_on_boot(), 1u);
  json j = Body(Post("/api/directives/open_file/invoke"));
  EXPECT_EQ(j["generated"], false);
  EXPECT_EQ(engine_->backend().call_count(), 0);
}

TEST_F(ServiceTest, Preflight) {
  auto r = client_->Options("/api/directives/open_file");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 204);
}

TEST(ServiceBindTest, BadPort) {
  testing::DemoEnv env;
  auto engine = Engine::Create(env.Config());
  Service s(*engine, ServiceConfig{"127.0.0.1", 70000, 0});
  EXPECT_THROW(s.Start(), Error);
}

}  // namespace
}  // namespace dco
