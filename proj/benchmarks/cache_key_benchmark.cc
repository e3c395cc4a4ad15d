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

#include <string>

#include "benchmark/benchmark.h"
#include "dco/llm_client.h"
#include "dco/orchestrator.h"

namespace dco {
namespace {

void BM_CacheKey(benchmark::State& state) {
  Directive d;
  d.id = "open_file";
  d.entry_point = "onOpenDynamic";
  d.text = std::string(static_cast<std::size_t>(state.range(0)), 'w');
  OrchestratorConfig config;
  for (auto _ : state) {
    std::string key = ComputeCacheKey(d, config);
    benchmark::DoNotOptimize(key);
  }
}
BENCHMARK(BM_CacheKey)->Range(64, 16384);

void BM_RequestKey(benchmark::State& state) {
  PromptBundle bundle;
  bundle.system_text = std::string(static_cast<std::size_t>(state.range(0)), 's');
  bundle.user_text = "Create a single function named onOpenDynamic.";
  bundle.model_id = "gpt-3.5-turbo";
  for (auto _ : state) {
    CompletionRequest r = MakeRequest(bundle, "open_file", 1, 3);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_RequestKey)->Range(64, 16384);

}  // namespace
}  // namespace dco
