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

#include "dco/engine.h"

#include "dco/error.h"

namespace dco {

std::unique_ptr<CompletionBackend> MakeBackend(const EngineConfig& config) {
  std::unique_ptr<CompletionBackend> backend;
  switch (config.backend) {
    case BackendKind::kHttp:
      backend = std::make_unique<HttpBackend>(HttpBackendOptions::FromEnv());
      break;
    case BackendKind::kReplay:
      if (config.fixtures_path.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "replay backend requires --fixtures");
      }
      backend = std::make_unique<ReplayBackend>(config.fixtures_path);
      break;
    case BackendKind::kMock:
      backend = MockBackend::Load(config.mock_script);
      break;
  }
  if (config.record_path) backend->RecordTo(*config.record_path);
  return backend;
}

StdModules LoadConfiguredStdModules(const EngineConfig& config) {
  return config.std_modules_path ? LoadStdModules(*config.std_modules_path)
                                 : DefaultStdModules();
}

std::unique_ptr<Engine> Engine::Create(const EngineConfig& config) {
  std::unique_ptr<Engine> engine(new Engine(config));
  DirectiveSet set = LoadDirectives(config.directives_path);
  if (config.timeout_ms) {
    if (*config.timeout_ms <= 0) throw Error(ErrorCode::kInvalidArgument, "timeout_ms must be positive");
    for (auto& d : set.directives) d.policy.timeout_ms = *config.timeout_ms;
  }
  engine->directives_ = std::make_unique<DirectiveStore>(std::move(set));
  engine->backend_ = MakeBackend(config);

  SandboxOptions sandbox_options;
  sandbox_options.max_workers = config.max_workers;
  sandbox_options.std_modules = LoadConfiguredStdModules(config);
  engine->sandbox_ = std::make_unique<Sandbox>(std::move(sandbox_options));

  engine->registry_ = std::make_unique<FunctionRegistry>(engine->directives_->HostPrelude());
  engine->blocks_ = std::make_unique<BlockStore>(config.blocks_path);

  OrchestratorConfig orchestrator_config;
  orchestrator_config.prompt.model_id = config.model_id;
  orchestrator_config.prompt.contract = config.contract;
  orchestrator_config.keep_raw_response = config.keep_raw_response;
  engine->orchestrator_ = std::make_unique<Orchestrator>(
      *engine->directives_, *engine->backend_, *engine->sandbox_, *engine->registry_,
      *engine->blocks_, std::move(orchestrator_config));
  engine->restored_ = engine->orchestrator_->RestoreFromStore();
  return engine;
}

}  // namespace dco
