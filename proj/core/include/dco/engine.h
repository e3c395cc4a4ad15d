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

#ifndef DCO_ENGINE_H_
#define DCO_ENGINE_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "dco/block_store.h"
#include "dco/code_loader.h"
#include "dco/directive_store.h"
#include "dco/llm_client.h"
#include "dco/orchestrator.h"
#include "dco/sandbox.h"

namespace dco {

struct EngineConfig {
  std::filesystem::path directives_path = "demo/editor.directives.json";
  BackendKind backend = BackendKind::kMock;
  std::filesystem::path fixtures_path;  // replay backend
  std::filesystem::path mock_script = "demo/editor.mock.json";
  std::filesystem::path blocks_path = "blocks.jsonl";
  std::optional<std::filesystem::path> std_modules_path;
  // Live replies are appended here when set.
  std::optional<std::filesystem::path> record_path;
  // Overrides every directive's policy timeout when set.
  std::optional<int> timeout_ms;
  int max_workers = 4;
  std::string model_id{kDefaultModelId};
  ResponseContract contract = ResponseContract::kFenced;
  bool keep_raw_response = true;
};

// Throws Error (kInvalidArgument when replay has no fixtures).
std::unique_ptr<CompletionBackend> MakeBackend(const EngineConfig& config);
StdModules LoadConfiguredStdModules(const EngineConfig& config);

// Everything a running application needs, wired together. Creation loads the
// directives and re-registers persisted ready blocks.
class Engine {
 public:
  static std::unique_ptr<Engine> Create(const EngineConfig& config);

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const EngineConfig& config() const { return config_; }
  DirectiveStore& directives() { return *directives_; }
  CompletionBackend& backend() { return *backend_; }
  Sandbox& sandbox() { return *sandbox_; }
  FunctionRegistry& registry() { return *registry_; }
  BlockStore& blocks() { return *blocks_; }
  Orchestrator& orchestrator() { return *orchestrator_; }
  std::size_t restored_on_boot() const { return restored_; }

 private:
  explicit Engine(EngineConfig config) : config_(std::move(config)) {}

  EngineConfig config_;
  std::unique_ptr<DirectiveStore> directives_;
  std::unique_ptr<CompletionBackend> backend_;
  std::unique_ptr<Sandbox> sandbox_;
  std::unique_ptr<FunctionRegistry> registry_;
  std::unique_ptr<BlockStore> blocks_;
  std::unique_ptr<Orchestrator> orchestrator_;
  std::size_t restored_ = 0;
};

}  // namespace dco

#endif  // DCO_ENGINE_H_
