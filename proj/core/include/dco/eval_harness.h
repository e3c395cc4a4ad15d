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

#ifndef DCO_EVAL_HARNESS_H_
#define DCO_EVAL_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dco/failure.h"
#include "dco/llm_client.h"
#include "dco/orchestrator.h"
#include "dco/sandbox.h"

namespace dco {

// A corpus task: a function header plus description, and a `tests` source
// defining check(candidate), which raises when the candidate is wrong.
struct EvalTask {
  std::string task_id;
  std::string prompt;
  std::string entry_point;
  std::string tests;
  std::optional<int> timeout_ms;
};

// JSONL, one task per line. Blank lines are skipped.
// Throws Error(kFileNotFound) or Error(kParseError) with the line number.
std::vector<EvalTask> ParseCorpus(std::string_view text);
std::vector<EvalTask> LoadCorpus(const std::filesystem::path& path);

struct SampleResult {
  std::string task_id;
  int sample_index = 0;
  std::optional<FailureCategory> verdict;  // Empty means pass.
  std::string detail;
  std::int64_t elapsed_ms = 0;
  std::optional<std::string> source_hash;  // Set once extraction succeeded.

  bool passed() const { return !verdict.has_value(); }
};

struct EvalReport {
  std::int64_t tasks = 0;
  std::int64_t samples = 0;
  std::int64_t pass_count = 0;
  // pass_count / samples; 0 for an empty run.
  double pass_rate = 0.0;
  // pass_count / (samples - extraction failures): the rate over replies
  // that yielded code at all. 0 when there are none.
  double pass_rate_extractable = 0.0;
  std::map<std::string, std::int64_t> category_counts;  // Non-zero only.
  std::vector<SampleResult> per_sample;  // Sorted by (task_id, sample_index).
};

EvalReport Aggregate(std::int64_t tasks, std::vector<SampleResult> samples);

// Per-sample timings are left out unless asked for, so that reports of the
// same run are byte-identical.
nlohmann::json ToJson(const EvalReport& report, bool include_timings = false);
EvalReport ReportFromJson(const nlohmann::json& j);
// Throws Error(kIoError).
void WriteReport(const EvalReport& report, const std::filesystem::path& path,
                 bool include_timings = false);

inline constexpr std::string_view kEvalSystemTemplate =
    "You are a programmer. Complete the requested Python function so that it "
    "passes its unit tests. Do not import external libraries.\n{CONTEXT}";

struct EvalConfig {
  OrchestratorConfig orchestrator = {std::string(kEvalSystemTemplate),
                                     {std::string(kDefaultModelId),
                                      ResponseContract::kJsonEnvelope},
                                     true};
  double temperature = 0.8;
  ImportPolicy import_policy = ImportPolicy::kDeny;
  std::vector<std::string> allowlist;
  int default_timeout_ms = 2000;
  int parallelism = 1;
};

// Generates k samples per task through the orchestrator pipeline (ephemeral,
// each sample in its own registry) and runs the task's check under the
// sandbox. Verdicts never throw.
class EvalHarness {
 public:
  EvalHarness(CompletionBackend& backend, Sandbox& sandbox, EvalConfig config = {});

  std::vector<SampleResult> RunTask(const EvalTask& task, int k);
  EvalReport RunCorpus(const std::vector<EvalTask>& corpus, int k);

  // The directive a task is turned into.
  Directive TaskDirective(const EvalTask& task) const;

 private:
  SampleResult RunSample(const EvalTask& task, int sample_index);

  CompletionBackend& backend_;
  Sandbox& sandbox_;
  EvalConfig config_;
};

}  // namespace dco

#endif  // DCO_EVAL_HARNESS_H_
