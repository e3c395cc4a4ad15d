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

#include "dco/cli.h"

#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dco/directive_store.h"
#include "demo_env.h"

namespace dco {
namespace {

using nlohmann::json;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Dco(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = CliDispatch(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  std::vector<std::string> With(std::vector<std::string> args) {
    for (const std::string& s : std::vector<std::string>
         {"--directives", env_.directives().string(), "--mock-script", env_.mock_script().string(),
          "--blocks-path", env_.blocks().string()}) {
      args.push_back(s);
    }
    return args;
  }
  testing::DemoEnv env_;
};

TEST(CliUsageTest, ExitCodes) {
  EXPECT_EQ(Dco({}).code, kExitUsage);
  EXPECT_EQ(Dco({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(Dco({"eval", "--k", "3"}).code, kExitUsage);
  EXPECT_EQ(Dco({"eval", "--corpus", "c", "--report", "r", "--k", "0"}).code, kExitUsage);
  EXPECT_EQ(Dco({"purge", "--scope", "some"}).code, kExitUsage);
  EXPECT_EQ(Dco({"invoke", "x", "--backend", "carrier-pigeon"}).code, kExitUsage);
  CliRun help = Dco({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("eval"), std::string::npos);
  EXPECT_NE(Dco({"bogus"}).err.find("dco:"), std::string::npos);
}

TEST_F(CliTest, GenerateAndInvoke) {
  CliRun g = Dco(With({"generate", "open_file"}));
  ASSERT_EQ(g.code, kExitOk) << g.err;
  EXPECT_EQ(json::parse(g.out)["status"], "ready");
  CliRun i = Dco(With({"invoke", "open_file"}));
  ASSERT_EQ(i.code, kExitOk) << i.err;
  json j = json::parse(i.out);
  EXPECT_EQ(j["outcome"]["status"], "ok");
  EXPECT_EQ(j["generated"], false);  // restored from the block store
  EXPECT_EQ(Dco(With({"invoke", "open_file", "--args", "{}"})).code, kExitUsage);
  EXPECT_EQ(Dco(With({"invoke", "open_file", "--args", "[1]"})).code, kExitDomainFailure);
}

TEST_F(CliTest, DomainFailures) {
  CliRun g = Dco(With({"generate", "missing_id"}));
  EXPECT_EQ(g.code, kExitDomainFailure);
  EXPECT_NE(g.err.find("UnknownDirective"), std::string::npos);
  EXPECT_EQ(Dco({"generate", "x", "--directives", "/nonexistent.json"}).code, kExitDomainFailure);
  // A reply without code leaves the block failed.
  testing::WriteFile(env_.mock_script(), R"({"default": "no code here"})");
  CliRun bad = Dco(With({"generate", "open_file"}));
  EXPECT_EQ(bad.code, kExitDomainFailure);
  EXPECT_EQ(json::parse(bad.out)["failure"]["category"], "ExtractionFailure");
}

TEST_F(CliTest, EditPersistsLikePut) {
  CliRun e = Dco(With({"edit", "open_file", "--text", testing::kWarnSentence, "--append"}));
  ASSERT_EQ(e.code, kExitOk) << e.err;
  json d = json::parse(e.out);
  EXPECT_EQ(d["version"], 2);
  const std::string expected = std::string(testing::kOpenFileText) + " " + testing::kWarnSentence;
  EXPECT_EQ(d["text"], expected);
  EXPECT_EQ(LoadDirectives(env_.directives()).directives[0].text, expected);
  CliRun i = Dco(With({"invoke", "open_file"}));
  ASSERT_EQ(i.code, kExitOk) << i.err;
  EXPECT_NE(json::parse(i.out)["block"]["source"].get<std::string>().find("showwarning"),
            std::string::npos);
  EXPECT_EQ(Dco(With({"edit", "open_file", "--text", ""})).code, kExitDomainFailure);
}

TEST_F(CliTest, BlocksAndPurge) {
  Dco(With({"generate", "open_file"}));
  Dco(With({"generate", "open_file"}));
  EXPECT_EQ(json::parse(Dco(With({"blocks"})).out).size(), 2u);
  EXPECT_EQ(json::parse(Dco(With({"blocks", "--directive", "x"})).out).size(), 0u);
  EXPECT_EQ(json::parse(Dco(With({"purge", "--scope", "failed_only"})).out)["purged"], 0);
  CliRun p = Dco(With({"purge"}));
  EXPECT_EQ(p.code, kExitOk);
  EXPECT_EQ(json::parse(p.out)["purged"], 2);
  EXPECT_EQ(json::parse(Dco(With({"blocks"})).out).size(), 0u);
}

TEST(CliEvalTest, Desk20Summary) {
  testing::TempDir dir;
  const std::string report = (dir / "report.json").string();
  CliRun r = Dco({"eval", "--corpus", testing::SourcePath("corpus/desk20.jsonl").string(), "--k",
               "5", "--report", report, "--backend", "replay", "--fixtures",
               testing::SourcePath("fixtures/desk20.jsonl").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  json summary = json::parse(r.out);
  EXPECT_EQ(summary["samples"], 100);
  EXPECT_EQ(summary["pass_count"], 50);
  EXPECT_FALSE(summary.contains("per_sample"));
  json full = json::parse(testing::ReadFile(report));
  EXPECT_EQ(full["per_sample"].size(), 100u);
  EXPECT_EQ(full["category_counts"], summary["category_counts"]);
  EXPECT_FALSE(full["per_sample"][0].contains("elapsed_ms"));

  CliRun strict = Dco({"eval", "--corpus", testing::SourcePath("corpus/desk20.jsonl").string(),
                    "--k", "5", "--report", report, "--backend", "replay", "--fixtures",
                    testing::SourcePath("fixtures/desk20.jsonl").string(), "--fail-on-failures",
                    "--include-timings"});
  EXPECT_EQ(strict.code, kExitDomainFailure);
  EXPECT_TRUE(json::parse(testing::ReadFile(report))["per_sample"][0].contains("elapsed_ms"));
}

TEST(CliEvalTest, MissingCorpusIsDomainFailure) {
  testing::TempDir dir;
  CliRun r = Dco({"eval", "--corpus", "/nonexistent.jsonl", "--report", (dir / "r.json").string()});
  EXPECT_EQ(r.code, kExitDomainFailure);
}

}  // namespace
}  // namespace dco
