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
#include "dco/response_parser.h"

namespace dco {
namespace {

std::string Reply(int lines) {
  std::string body = "def f(x):\n";
  for (int i = 0; i < lines; ++i) body += "    x = x + " + std::to_string(i) + "\n";
  body += "    return x";
  return "Sure, here it is:\n\n```python\n" + body + "\n```\nLet me know.";
}

void BM_ExtractFenced(benchmark::State& state) {
  const std::string reply = Reply(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = ExtractCode(reply, ResponseContract::kFenced);
    benchmark::DoNotOptimize(r);
  }
  state.SetBytesProcessed(state.iterations() * static_cast<int64_t>(reply.size()));
}
BENCHMARK(BM_ExtractFenced)->Range(8, 4096);

void BM_ExtractEnvelope(benchmark::State& state) {
  std::string code = "def f(x):\\n";
  for (int i = 0; i < state.range(0); ++i) code += "    x += 1\\n";
  const std::string reply = "{\"code\": \"" + code + "    return x\"}";
  for (auto _ : state) {
    auto r = ExtractCode(reply, ResponseContract::kJsonEnvelope);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ExtractEnvelope)->Range(8, 4096);

}  // namespace
}  // namespace dco
