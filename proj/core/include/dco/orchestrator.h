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

#ifndef DCO_ORCHESTRATOR_H_
#define DCO_ORCHESTRATOR_H_

#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "dco/block_store.h"
#include "dco/code_loader.h"
#include "dco/directive_store.h"
#include "dco/llm_client.h"
#include "dco/prompt_builder.h"
#include "dco/sandbox.h"

namespace dco {

struct OrchestratorConfig {
  std::string system_template{kDefaultSystemTemplate};
  PromptConfig prompt;
  // Drop raw replies from persisted blocks to save space.
  bool keep_raw_response = true;
};

// SHA-256 over text, entry point, system template, model id, generation mode
// and temperature (%.6f), newline separated. The directive version is not
// part of the key: an edit that leaves the text unchanged keeps the block.
std::string ComputeCacheKey(const Directive& directive, const OrchestratorConfig& config);

struct GenerateOptions {
  // Registry to bind into; the orchestrator's own when null.
  FunctionRegistry* registry = nullptr;
  std::optional<int> sample_index;
  bool persist = true;
};

struct InvocationResult {
  std::optional<InvocationOutcome> outcome;  // Empty when nothing was invoked.
  GeneratedBlock block;
  std::optional<FailureRecord> failure;  // Why nothing was invoked.
  bool generated = false;                // False when a cached block was reused.
};

nlohmann::json ToJson(const InvocationResult& result);

// Directive -> prompt -> completion -> extract -> guard -> compile ->
// register -> invoke. Safe for concurrent use; concurrent invokes that need
// the same missing block share one generation.
class Orchestrator {
 public:
  Orchestrator(DirectiveStore& directives, CompletionBackend& backend, Sandbox& sandbox,
               FunctionRegistry& registry, BlockStore& blocks, OrchestratorConfig config = {});

  Orchestrator(const Orchestrator&) = delete;
  Orchestrator& operator=(const Orchestrator&) = delete;

  std::string CacheKey(const Directive& directive) const;

  // Runs the pipeline once. The first failing stage ends it; failures are
  // carried in the block, never thrown.
  GeneratedBlock GenerateBlock(const Directive& directive, const GenerateOptions& options = {});

  // Generates a fresh block for the directive's current version and, when
  // ready, makes it the cached block. Throws Error(kUnknownDirective).
  GeneratedBlock Regenerate(std::string_view directive_id);

  // Throws Error(kUnknownDirective) and Error(kInvalidArgument) for bad args.
  InvocationResult InvokeAction(std::string_view directive_id, const nlohmann::json& args);

  // Deletes persisted records and forgets matching cached blocks. Live
  // registry bindings stay, so in-flight calls are unaffected.
  std::size_t PurgeBlocks(const PurgeScope& scope);

  // Re-registers the newest ready persisted block of each directive whose
  // cache key still matches. Returns how many were restored.
  std::size_t RestoreFromStore();

  std::optional<GeneratedBlock> CachedBlock(std::string_view directive_id) const;

  const OrchestratorConfig& config() const { return config_; }
  DirectiveStore& directives() { return directives_; }
  BlockStore& blocks() { return blocks_; }
  FunctionRegistry& registry() { return registry_; }
  CompletionBackend& backend() { return backend_; }

 private:
  GeneratedBlock ObtainCached(const Directive& directive, bool& generated);

  DirectiveStore& directives_;
  CompletionBackend& backend_;
  Sandbox& sandbox_;
  FunctionRegistry& registry_;
  BlockStore& blocks_;
  OrchestratorConfig config_;

  mutable std::mutex mu_;
  std::unordered_map<std::string, GeneratedBlock> cache_;  // directive id -> ready block
  std::map<std::string, std::shared_future<GeneratedBlock>> in_flight_;  // by cache key
};

}  // namespace dco

#endif  // DCO_ORCHESTRATOR_H_
