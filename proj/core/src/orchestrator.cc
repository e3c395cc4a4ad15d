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

#include "dco/orchestrator.h"

#include <cstdio>

#include "dco/error.h"
#include "dco/hash.h"
#include "dco/response_parser.h"

namespace dco {
namespace {

GeneratedBlock Failed(GeneratedBlock block, FailureCategory category, std::string detail,
                      Stage stage) {
  block.status = BlockStatus::kFailed;
  block.failure = FailureRecord{category, std::move(detail), stage};
  return block;
}

}  // namespace

std::string ComputeCacheKey(const Directive& directive, const OrchestratorConfig& config) {
  char temperature[64];
  std::snprintf(temperature, sizeof(temperature), "%.6f",
                directive.policy.EffectiveTemperature());
  std::string material;
  material += directive.text;
  material += '\n';
  material += directive.entry_point;
  material += '\n';
  material += config.system_template;
  material += '\n';
  material += config.prompt.model_id;
  material += '\n';
  material += ToString(directive.policy.mode);
  material += '\n';
  material += temperature;
  return Sha256Hex(material);
}

nlohmann::json ToJson(const InvocationResult& result) {
  nlohmann::json j = {{"outcome", result.outcome ? ToJson(*result.outcome) : nlohmann::json()},
                      {"block", ToJson(result.block)},
                      {"generated", result.generated}};
  if (result.failure) j["failure"] = ToJson(*result.failure);
  return j;
}

Orchestrator::Orchestrator(DirectiveStore& directives, CompletionBackend& backend,
                           Sandbox& sandbox, FunctionRegistry& registry, BlockStore& blocks,
                           OrchestratorConfig config)
    : directives_(directives),
      backend_(backend),
      sandbox_(sandbox),
      registry_(registry),
      blocks_(blocks),
      config_(std::move(config)) {}

std::string Orchestrator::CacheKey(const Directive& directive) const {
  return ComputeCacheKey(directive, config_);
}

GeneratedBlock Orchestrator::GenerateBlock(const Directive& directive,
                                           const GenerateOptions& options) {
  GeneratedBlock block;
  block.directive_id = directive.id;
  block.directive_version = directive.version;
  block.cache_key = CacheKey(directive);
  block.created_at = NowMs();

  auto finish = [&](GeneratedBlock b) {
    if (!config_.keep_raw_response) b.raw_response.clear();
    if (options.persist) blocks_.Append(b);
    return b;
  };

  std::string reply;
  try {
    const std::string system_text = BuildSystemPrompt(
        directive.context_sources, config_.system_template, directives_.Resolve("."));
    PromptBundle bundle = BuildRequest(directive, system_text, config_.prompt);
    CompletionRequest request =
        MakeRequest(std::move(bundle), directive.id, directive.version, options.sample_index);
    reply = backend_.Complete(request).text;
  } catch (const Error& e) {
    return finish(Failed(std::move(block), FailureCategory::kBackendError, e.what(),
                         Stage::kGenerate));
  }
  block.raw_response = reply;

  ExtractionResult extracted = ExtractCode(reply, config_.prompt.contract);
  if (!extracted.ok()) {
    block.status = BlockStatus::kFailed;
    block.failure = extracted.failure;
    return finish(std::move(block));
  }

  PolicyResult guarded = ApplyPolicy(*extracted.source, directive.policy, sandbox_.std_modules());
  block.source = guarded.source ? *guarded.source : *extracted.source;
  block.source_hash = Sha256Hex(block.source);
  if (guarded.failure) {
    block.status = BlockStatus::kFailed;
    block.failure = guarded.failure;
    return finish(std::move(block));
  }

  CompileResult compiled = CompileBlock(block.source);
  if (!compiled.unit) {
    block.status = BlockStatus::kFailed;
    block.failure = compiled.failure;
    return finish(std::move(block));
  }

  RegisterOptions register_options;
  register_options.trial_sandbox = &sandbox_;
  register_options.trial_timeout_ms = directive.policy.timeout_ms;
  register_options.required_name = directive.entry_point;
  FunctionRegistry& target = options.registry ? *options.registry : registry_;
  RegisterResult registered = Register(*compiled.unit, target,
                                       Owner{directive.id, directive.version}, register_options);
  if (registered.failure) {
    block.status = BlockStatus::kFailed;
    block.failure = registered.failure;
    return finish(std::move(block));
  }
  block.status = BlockStatus::kReady;
  return finish(std::move(block));
}

GeneratedBlock Orchestrator::ObtainCached(const Directive& directive, bool& generated) {
  const std::string key = CacheKey(directive);
  std::promise<GeneratedBlock> promise;
  {
    std::unique_lock lock(mu_);
    if (auto it = cache_.find(directive.id); it != cache_.end() && it->second.cache_key == key) {
      generated = false;
      return it->second;
    }
    if (auto it = in_flight_.find(key); it != in_flight_.end()) {
      auto shared = it->second;
      lock.unlock();
      generated = false;
      return shared.get();
    }
    in_flight_.emplace(key, promise.get_future().share());
  }
  GeneratedBlock block;
  try {
    block = GenerateBlock(directive);
  } catch (...) {
    std::lock_guard lock(mu_);
    in_flight_.erase(key);
    promise.set_exception(std::current_exception());
    throw;
  }
  {
    std::lock_guard lock(mu_);
    if (block.ready()) cache_[directive.id] = block;
    in_flight_.erase(key);
  }
  promise.set_value(block);
  generated = true;
  return block;
}

GeneratedBlock Orchestrator::Regenerate(std::string_view directive_id) {
  const Directive directive = directives_.Get(directive_id);
  GeneratedBlock block = GenerateBlock(directive);
  if (block.ready() && directive.policy.cache == CacheMode::kCached) {
    std::lock_guard lock(mu_);
    cache_[directive.id] = block;
  }
  return block;
}

InvocationResult Orchestrator::InvokeAction(std::string_view directive_id,
                                            const nlohmann::json& args) {
  const Directive directive = directives_.Get(directive_id);
  if (!args.is_array()) throw Error(ErrorCode::kInvalidArgument, "args must be a JSON array");
  InvocationResult result;
  if (directive.policy.cache == CacheMode::kCached) {
    result.block = ObtainCached(directive, result.generated);
  } else {
    result.block = GenerateBlock(directive);
    result.generated = true;
  }
  if (!result.block.ready()) {
    result.failure = result.block.failure;
    return result;
  }
  ResolveResult resolved = Resolve(registry_, directive.entry_point);
  if (!resolved.callable) {
    result.failure = resolved.failure;
    return result;
  }
  result.outcome = sandbox_.InvokeJson(*resolved.callable, args, directive.policy.timeout_ms);
  return result;
}

std::size_t Orchestrator::PurgeBlocks(const PurgeScope& scope) {
  const TimestampMs now = NowMs();
  const std::size_t purged = blocks_.Purge(scope, now);
  std::lock_guard lock(mu_);
  for (auto it = cache_.begin(); it != cache_.end();) {
    if (scope.Matches(it->second, now)) {
      it = cache_.erase(it);
    } else {
      ++it;
    }
  }
  return purged;
}

std::size_t Orchestrator::RestoreFromStore() {
  std::map<std::string, GeneratedBlock> newest;
  for (auto& block : blocks_.LoadAll()) {
    if (block.ready()) newest[block.directive_id] = std::move(block);
  }
  std::size_t restored = 0;
  for (auto& [id, block] : newest) {
    if (!directives_.Contains(id)) continue;
    const Directive directive = directives_.Get(id);
    if (block.cache_key != CacheKey(directive)) continue;
    CompileResult compiled = CompileBlock(block.source);
    if (!compiled.unit) continue;
    RegisterOptions options;
    options.trial_sandbox = &sandbox_;
    options.trial_timeout_ms = directive.policy.timeout_ms;
    options.required_name = directive.entry_point;
    RegisterResult registered = Register(*compiled.unit, registry_,
                                         Owner{id, block.directive_version}, options);
    if (registered.failure) continue;
    if (directive.policy.cache == CacheMode::kCached) {
      std::lock_guard lock(mu_);
      cache_[id] = block;
    }
    ++restored;
  }
  return restored;
}

std::optional<GeneratedBlock> Orchestrator::CachedBlock(std::string_view directive_id) const {
  std::lock_guard lock(mu_);
  auto it = cache_.find(std::string(directive_id));
  if (it == cache_.end()) return std::nullopt;
  return it->second;
}

}  // namespace dco
