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

#include <signal.h>

#include <algorithm>
#include <iostream>

#include <CLI11.hpp>

#include "dco/engine.h"
#include "dco/error.h"
#include "dco/eval_harness.h"
#include "dco/service.h"

namespace dco {
namespace {

using nlohmann::json;

struct CommonOptions {
  std::string directives = "demo/editor.directives.json";
  std::string backend = "mock";
  std::string fixtures;
  std::string mock_script = "demo/editor.mock.json";
  std::string blocks_path = "blocks.jsonl";
  std::string std_modules;
  std::string record;
  std::string model = ModelIdFromEnv();
  std::string contract = "fenced";
  int timeout_ms = 0;
  int parallelism = 4;
  bool drop_raw = false;
};

EngineConfig ToEngineConfig(const CommonOptions& o) {
  EngineConfig config;
  config.directives_path = o.directives;
  config.backend = *ParseBackendKind(o.backend);
  config.fixtures_path = o.fixtures;
  config.mock_script = o.mock_script;
  config.blocks_path = o.blocks_path;
  if (!o.std_modules.empty()) config.std_modules_path = o.std_modules;
  if (!o.record.empty()) config.record_path = o.record;
  if (o.timeout_ms > 0) config.timeout_ms = o.timeout_ms;
  config.max_workers = o.parallelism;
  config.model_id = o.model;
  config.contract = *ParseResponseContract(o.contract);
  config.keep_raw_response = !o.drop_raw;
  return config;
}

int ServeUntilSignal(Engine& engine, const ServiceConfig& config, std::ostream& err) {
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  Service service(engine, config);
  service.Start();
  err << "dco: serving on http://" << config.host << ":" << service.port() << std::endl;
  int signal_number = 0;
  sigwait(&signals, &signal_number);
  service.Stop();
  return kExitOk;
}

}  // namespace

int CliDispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Run written-language directives as generated, sandboxed code.", "dco"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions o;
  app.add_option("--directives", o.directives, "Directives JSON file")->capture_default_str();
  app.add_option("--backend", o.backend, "Completion backend")
      ->check(CLI::IsMember({"http", "replay", "mock"}))
      ->capture_default_str();
  app.add_option("--fixtures", o.fixtures, "Replay fixture file (JSONL)");
  app.add_option("--mock-script", o.mock_script, "Scripted replies for the mock backend")
      ->capture_default_str();
  app.add_option("--blocks-path", o.blocks_path, "Block store (JSONL)")->capture_default_str();
  app.add_option("--std-modules", o.std_modules, "Standard-module list allowed under deny");
  app.add_option("--record", o.record, "Append every reply to this fixture file");
  app.add_option("--model", o.model, "Model id (default: $DCO_MODEL or gpt-3.5-turbo)");
  auto* contract_opt = app.add_option("--contract", o.contract, "Response contract")
                           ->check(CLI::IsMember({"fenced", "json_envelope"}));
  app.add_option("--timeout-ms", o.timeout_ms, "Override every directive's timeout")
      ->check(CLI::PositiveNumber);
  app.add_option("--parallelism", o.parallelism, "Sandbox workers / eval threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--drop-raw-response", o.drop_raw, "Do not persist raw model replies");

  std::string id;
  auto* generate = app.add_subcommand("generate", "Generate and register a block for a directive");
  generate->add_option("id", id, "Directive id")->required();

  std::string args_json = "[]";
  auto* invoke = app.add_subcommand("invoke", "Invoke a directive's action");
  invoke->add_option("id", id, "Directive id")->required();
  invoke->add_option("--args", args_json, "JSON array of arguments")->capture_default_str();

  std::string text;
  bool append = false;
  auto* edit = app.add_subcommand("edit", "Replace (or append to) a directive's text");
  edit->add_option("id", id, "Directive id")->required();
  edit->add_option("--text", text, "New text")->required();
  edit->add_flag("--append", append, "Append to the current text instead of replacing it");

  std::string directive_filter;
  auto* blocks = app.add_subcommand("blocks", "List persisted block records");
  blocks->add_option("--directive", directive_filter, "Only this directive's blocks");

  std::string scope = "all";
  std::int64_t older_than_ms = 0;
  auto* purge = app.add_subcommand("purge", "Delete persisted block records");
  purge->add_option("--scope", scope)
      ->check(CLI::IsMember({"all", "failed_only", "older_than"}))
      ->capture_default_str();
  purge->add_option("--older-than-ms", older_than_ms)->check(CLI::NonNegativeNumber);

  std::string corpus_path, report_path;
  int k = 1;
  double temperature = 0.8;
  bool include_timings = false;
  bool fail_on_failures = false;
  auto* eval = app.add_subcommand("eval", "Run the evaluation harness over a corpus");
  eval->add_option("--corpus", corpus_path, "Corpus JSONL")->required();
  eval->add_option("--k", k, "Samples per task")->check(CLI::PositiveNumber)->capture_default_str();
  eval->add_option("--report", report_path, "Report output path")->required();
  eval->add_option("--temperature", temperature, "Sampling temperature")
      ->check(CLI::Range(0.0, 2.0))
      ->capture_default_str();
  eval->add_flag("--include-timings", include_timings, "Add per-sample elapsed_ms");
  eval->add_flag("--fail-on-failures", fail_on_failures, "Exit 1 unless every sample passed");

  ServiceConfig service_config;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--port", service_config.port)->check(CLI::Range(1, 65535))->capture_default_str();
  serve->add_option("--host", service_config.host)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "dco: " << e.what() << "\n" << "Run with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (*eval) {
      EvalConfig config;
      config.orchestrator.prompt.model_id = o.model;
      if (contract_opt->count() > 0) {
        config.orchestrator.prompt.contract = *ParseResponseContract(o.contract);
      }
      config.temperature = temperature;
      config.parallelism = o.parallelism;
      if (o.timeout_ms > 0) config.default_timeout_ms = o.timeout_ms;
      EngineConfig engine_config = ToEngineConfig(o);
      auto backend = MakeBackend(engine_config);
      SandboxOptions sandbox_options;
      sandbox_options.max_workers = o.parallelism;
      sandbox_options.std_modules = LoadConfiguredStdModules(engine_config);
      Sandbox sandbox(std::move(sandbox_options));
      EvalHarness harness(*backend, sandbox, config);
      EvalReport report = harness.RunCorpus(LoadCorpus(corpus_path), k);
      WriteReport(report, report_path, include_timings);
      json summary = ToJson(report);
      summary.erase("per_sample");
      out << summary.dump() << "\n";
      return fail_on_failures && report.pass_count != report.samples ? kExitDomainFailure
                                                                     : kExitOk;
    }

    if (*edit) {
      DirectiveSet set = LoadDirectives(o.directives);
      DirectiveStore store(std::move(set));
      std::string new_text = text;
      if (append) new_text = store.Get(id).text + " " + text;
      Directive updated = store.UpdateText(id, new_text);
      DirectiveSet snapshot = store.Snapshot();
      WriteDirectives(snapshot, o.directives);
      out << ToJson(updated).dump() << "\n";
      return kExitOk;
    }

    auto engine = Engine::Create(ToEngineConfig(o));
    if (*generate) {
      GeneratedBlock block = engine->orchestrator().Regenerate(id);
      out << ToJson(block).dump() << "\n";
      return block.ready() ? kExitOk : kExitDomainFailure;
    }
    if (*invoke) {
      json call_args = json::parse(args_json, nullptr, false);
      if (call_args.is_discarded() || !call_args.is_array()) {
        err << "dco: --args must be a JSON array\n";
        return kExitUsage;
      }
      InvocationResult result = engine->orchestrator().InvokeAction(id, call_args);
      out << ToJson(result).dump() << "\n";
      const bool ok = result.outcome && result.outcome->status == InvocationStatus::kOk;
      return ok ? kExitOk : kExitDomainFailure;
    }
    if (*blocks) {
      json list = json::array();
      for (const auto& b : engine->blocks().LoadAll()) {
        if (directive_filter.empty() || b.directive_id == directive_filter) {
          list.push_back(ToJson(b));
        }
      }
      out << list.dump() << "\n";
      return kExitOk;
    }
    if (*purge) {
      PurgeScope purge_scope = scope == "all"           ? PurgeScope::All()
                               : scope == "failed_only" ? PurgeScope::FailedOnly()
                                                        : PurgeScope::OlderThan(older_than_ms);
      out << json{{"purged", engine->orchestrator().PurgeBlocks(purge_scope)}}.dump() << "\n";
      return kExitOk;
    }
    if (*serve) return ServeUntilSignal(*engine, service_config, err);
  } catch (const Error& e) {
    err << "dco: " << e.what() << "\n";
    return kExitDomainFailure;
  }
  return kExitUsage;
}

int CliDispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return CliDispatch(args, std::cout, std::cerr);
}

}  // namespace dco
