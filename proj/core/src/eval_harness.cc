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

#include "dco/eval_harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "dco/error.h"

namespace dco {
namespace {

using nlohmann::json;

int CountTopLevelChecks(std::string_view tests) {
  int count = 0;
  std::size_t start = 0;
  while (start < tests.size()) {
    auto nl = tests.find('\n', start);
    std::string_view line = tests.substr(start, nl == std::string_view::npos ? nl : nl - start);
    if (line.substr(0, 10) == "def check(" || line.substr(0, 10) == "def check ") ++count;
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return count;
}

EvalTask TaskFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "task must be an object");
  EvalTask task;
  for (auto [field, target] : {std::pair<const char*, std::string*>{"task_id", &task.task_id},
                               {"prompt", &task.prompt},
                               {"entry_point", &task.entry_point},
                               {"tests", &task.tests}}) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string()) {
      throw Error(ErrorCode::kParseError, std::string("missing string field \"") + field + "\"");
    }
    *target = NormalizeNewlines(it->get<std::string>());
  }
  if (auto it = j.find("timeout_ms"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<int>() <= 0) {
      throw Error(ErrorCode::kParseError, "timeout_ms must be a positive integer");
    }
    task.timeout_ms = it->get<int>();
  }
  if (task.task_id.empty()) throw Error(ErrorCode::kParseError, "task_id is empty");
  if (!IsIdentifier(task.entry_point)) {
    throw Error(ErrorCode::kParseError, "entry_point is not an identifier");
  }
  if (CountTopLevelChecks(task.tests) != 1) {
    throw Error(ErrorCode::kParseError, "tests must define exactly one check function");
  }
  return task;
}

}  // namespace

std::vector<EvalTask> ParseCorpus(std::string_view text) {
  std::vector<EvalTask> tasks;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kParseError, "malformed JSON", line_no);
    try {
      tasks.push_back(TaskFromJson(j));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, e.detail(), line_no);
    }
  }
  return tasks;
}

std::vector<EvalTask> LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseCorpus(ss.str());
}

EvalReport Aggregate(std::int64_t tasks, std::vector<SampleResult> samples) {
  std::sort(samples.begin(), samples.end(), [](const SampleResult& a, const SampleResult& b) {
    if (a.task_id != b.task_id) return a.task_id < b.task_id;
    return a.sample_index < b.sample_index;
  });
  EvalReport report;
  report.tasks = tasks;
  report.samples = static_cast<std::int64_t>(samples.size());
  std::int64_t extraction_failures = 0;
  for (const auto& s : samples) {
    if (s.passed()) {
      ++report.pass_count;
    } else {
      ++report.category_counts[std::string(ToString(*s.verdict))];
      if (*s.verdict == FailureCategory::kExtractionFailure) ++extraction_failures;
    }
  }
  if (report.samples > 0) {
    report.pass_rate = static_cast<double>(report.pass_count) / report.samples;
  }
  const std::int64_t extractable = report.samples - extraction_failures;
  if (extractable > 0) {
    report.pass_rate_extractable = static_cast<double>(report.pass_count) / extractable;
  }
  report.per_sample = std::move(samples);
  return report;
}

json ToJson(const EvalReport& report, bool include_timings) {
  json per_sample = json::array();
  for (const auto& s : report.per_sample) {
    json item = {{"task_id", s.task_id},
                 {"sample_index", s.sample_index},
                 {"verdict", s.passed() ? std::string("pass") : std::string(ToString(*s.verdict))},
                 {"detail", s.detail}};
    if (s.source_hash) item["source_hash"] = *s.source_hash;
    if (include_timings) item["elapsed_ms"] = s.elapsed_ms;
    per_sample.push_back(std::move(item));
  }
  return {{"tasks", report.tasks},
          {"samples", report.samples},
          {"pass_count", report.pass_count},
          {"pass_rate", report.pass_rate},
          {"pass_rate_extractable", report.pass_rate_extractable},
          {"category_counts", report.category_counts},
          {"per_sample", std::move(per_sample)}};
}

EvalReport ReportFromJson(const json& j) {
  try {
    EvalReport report;
    report.tasks = j.at("tasks").get<std::int64_t>();
    report.samples = j.at("samples").get<std::int64_t>();
    report.pass_count = j.at("pass_count").get<std::int64_t>();
    report.pass_rate = j.at("pass_rate").get<double>();
    report.pass_rate_extractable = j.at("pass_rate_extractable").get<double>();
    report.category_counts = j.at("category_counts").get<std::map<std::string, std::int64_t>>();
    for (const auto& item : j.at("per_sample")) {
      SampleResult s;
      s.task_id = item.at("task_id").get<std::string>();
      s.sample_index = item.at("sample_index").get<int>();
      const auto verdict = item.at("verdict").get<std::string>();
      if (verdict != "pass") {
        s.verdict = ParseFailureCategory(verdict);
        if (!s.verdict) throw Error(ErrorCode::kParseError, "unknown verdict " + verdict);
      }
      s.detail = item.value("detail", "");
      s.elapsed_ms = item.value("elapsed_ms", std::int64_t{0});
      if (item.contains("source_hash")) s.source_hash = item["source_hash"].get<std::string>();
      report.per_sample.push_back(std::move(s));
    }
    return report;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

void WriteReport(const EvalReport& report, const std::filesystem::path& path,
                 bool include_timings) {
  if (std::filesystem::is_directory(path)) {
    throw Error(ErrorCode::kIoError, path.string() + " is a directory");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << ToJson(report, include_timings).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

EvalHarness::EvalHarness(CompletionBackend& backend, Sandbox& sandbox, EvalConfig config)
    : backend_(backend), sandbox_(sandbox), config_(std::move(config)) {}

Directive EvalHarness::TaskDirective(const EvalTask& task) const {
  Directive d;
  d.id = task.task_id;
  d.entry_point = task.entry_point;
  d.text = task.prompt;
  d.policy.mode = GenerationMode::kDiverse;
  d.policy.temperature = config_.temperature;
  d.policy.cache = CacheMode::kEphemeral;
  d.policy.timeout_ms = task.timeout_ms.value_or(config_.default_timeout_ms);
  d.policy.import_policy = config_.import_policy;
  d.policy.allowlist = config_.allowlist;
  return d;
}

SampleResult EvalHarness::RunSample(const EvalTask& task, int sample_index) {
  const auto start = std::chrono::steady_clock::now();
  SampleResult result;
  result.task_id = task.task_id;
  result.sample_index = sample_index;
  auto finish = [&](std::optional<FailureCategory> verdict, std::string detail) {
    result.verdict = verdict;
    result.detail = std::move(detail);
    result.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return result;
  };

  // Blocks are not persisted and each sample binds into its own registry.
  DirectiveStore no_directives(DirectiveSet{});
  BlockStore no_blocks;
  FunctionRegistry sample_registry;
  Orchestrator orchestrator(no_directives, backend_, sandbox_, sample_registry, no_blocks,
                            config_.orchestrator);
  const Directive directive = TaskDirective(task);
  GenerateOptions options;
  options.sample_index = sample_index;
  options.persist = false;
  GeneratedBlock block = orchestrator.GenerateBlock(directive, options);
  if (!block.source_hash.empty()) result.source_hash = block.source_hash;
  if (!block.ready()) return finish(block.failure->category, block.failure->detail);

  ResolveResult candidate = Resolve(sample_registry, task.entry_point);
  if (!candidate.callable) return finish(candidate.failure->category, candidate.failure->detail);

  FunctionRegistry test_registry;
  CompileResult tests = CompileBlock(task.tests);
  if (!tests.unit) {
    return finish(FailureCategory::kRuntimeError, "tests do not compile: " + tests.failure->detail);
  }
  RegisterOptions test_options;
  test_options.required_name = "check";
  RegisterResult registered =
      Register(*tests.unit, test_registry, Owner{task.task_id + ".tests", 1}, test_options);
  if (registered.failure) {
    return finish(FailureCategory::kRuntimeError, "tests failed to load: " + registered.failure->detail);
  }
  ResolveResult check = Resolve(test_registry, "check");

  InvocationOutcome outcome =
      sandbox_.Invoke(*check.callable, {candidate.callable->fn}, directive.policy.timeout_ms);
  switch (outcome.status) {
    case InvocationStatus::kOk:
      return finish(std::nullopt, "");
    case InvocationStatus::kTimeout:
      return finish(FailureCategory::kTimeout,
                    "check exceeded " + std::to_string(directive.policy.timeout_ms) + " ms");
    case InvocationStatus::kRuntimeError:
      if (outcome.error_type == "AssertionError") {
        return finish(FailureCategory::kTestFailure, outcome.error_message);
      }
      return finish(FailureCategory::kRuntimeError, outcome.error_message);
  }
  return finish(FailureCategory::kRuntimeError, "unreachable");
}

std::vector<SampleResult> EvalHarness::RunTask(const EvalTask& task, int k) {
  std::vector<SampleResult> results;
  results.reserve(static_cast<std::size_t>(std::max(k, 0)));
  for (int i = 0; i < k; ++i) results.push_back(RunSample(task, i));
  return results;
}

EvalReport EvalHarness::RunCorpus(const std::vector<EvalTask>& corpus, int k) {
  const std::size_t per_task = static_cast<std::size_t>(std::max(k, 0));
  const std::size_t total = corpus.size() * per_task;
  std::vector<SampleResult> results(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
      results[i] = RunSample(corpus[i / per_task], static_cast<int>(i % per_task));
    }
  };
  const int threads = std::max(1, std::min<int>(config_.parallelism, static_cast<int>(total)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return Aggregate(static_cast<std::int64_t>(corpus.size()), std::move(results));
}

}  // namespace dco
