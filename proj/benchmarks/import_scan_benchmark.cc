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
#include "dco/directive_store.h"
#include "dco/sandbox.h"

namespace dco {
namespace {

std::string Source(int functions) {
  std::string s = "import os\n";
  for (int i = 0; i < functions; ++i) {
    s += "def f" + std::to_string(i) + "(self):\n";
    s += "    from json import dumps\n";
    s += "    import numpy as np\n";
    s += "    \"\"\"import requests\"\"\"\n";
    s += "    return dumps(np.zeros(3).tolist())\n";
  }
  return s;
}

void BM_ScanImports(benchmark::State& state) {
  const std::string source = Source(static_cast<int>(state.range(0)));
  const auto& std_modules = DefaultStdModules();
  for (auto _ : state) {
    auto r = ScanImports(source, {}, std_modules);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ScanImports)->Range(1, 512);

void BM_StripPolicy(benchmark::State& state) {
  const std::string source = Source(static_cast<int>(state.range(0)));
  GenerationPolicy policy;
  policy.import_policy = ImportPolicy::kStrip;
  for (auto _ : state) {
    auto r = ApplyPolicy(source, policy, DefaultStdModules());
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_StripPolicy)->Range(1, 512);

}  // namespace
}  // namespace dco
