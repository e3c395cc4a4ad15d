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

#include "dco/code_loader.h"

#include <algorithm>
#include <random>
#include <thread>

#include <gtest/gtest.h>

#include "dco/error.h"
#include "dco/hash.h"
#include "dco/sandbox.h"
#include "test_util.h"

namespace dco {
namespace {

using nlohmann::json;

CompiledUnit Compile(const std::string& source) {
  CompileResult r = CompileBlock(source);
  EXPECT_TRUE(r.unit) << (r.failure ? r.failure->detail : "");
  return std::move(*r.unit);
}

TEST(CompileBlockTest, CompilesAndHashes) {
  const std::string src = "def add(a,b):\n    return a+b";
  CompiledUnit unit = Compile(src);
  EXPECT_EQ(unit.source, src);
  EXPECT_EQ(unit.source_hash, Sha256Hex(src));
  EXPECT_TRUE(unit.defined_names.empty());  // nothing has run yet
}

TEST(CompileBlockTest, SyntaxErrorLine) {
  CompileResult r = CompileBlock("def broken(:\n");
  ASSERT_FALSE(r.unit);
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->category, FailureCategory::kCompileError);
  EXPECT_EQ(r.failure->stage, Stage::kCompile);
  EXPECT_EQ(r.error_line, 1);
  EXPECT_EQ(r.failure->detail.rfind("line 1:", 0), 0u);

  CompileResult later = CompileBlock("def f():\n    return 1\n\ndef g()\n    return 2\n");
  EXPECT_EQ(later.error_line, 4);
  EXPECT_EQ(CompileBlock("  \n").failure->category, FailureCategory::kCompileError);
}

TEST(CompileBlockTest, WalkthroughListing) {
  CompiledUnit unit = Compile(testing::kOpenFileListing);
  FunctionRegistry registry;
  RegisterResult r = Register(unit, registry, Owner{"open_file", 1});
  ASSERT_FALSE(r.failure);
  EXPECT_EQ(r.names, std::vector<std::string>{"onOpenDynamic"});
  EXPECT_EQ(unit.defined_names, r.names);
}

TEST(RegisterTest, BindsAndResolves) {
  FunctionRegistry registry;
  CompiledUnit unit = Compile("def add(a,b):\n    return a+b");
  RegisterResult r = Register(unit, registry, Owner{"math", 3});
  EXPECT_EQ(r.names, std::vector<std::string>{"add"});
  ResolveResult resolved = Resolve(registry, "add");
  ASSERT_TRUE(resolved.callable);
  EXPECT_EQ(resolved.callable->meta.directive_id, "math");
  EXPECT_EQ(resolved.callable->meta.directive_version, 3);
  EXPECT_EQ(resolved.callable->meta.source_hash, unit.source_hash);
  EXPECT_GT(resolved.callable->meta.registered_at, 0);
  Sandbox sandbox;
  EXPECT_EQ(sandbox.InvokeJson(*resolved.callable, json::array({2, 3}), 2000).value, 5);
}

TEST(RegisterTest, TopLevelRaiseLeavesRegistryUnchanged) {
  FunctionRegistry registry;
  CompiledUnit good = Compile("def f():\n    return 'old'\n");
  Register(good, registry, Owner{"d", 1});
  CompiledUnit bad = Compile("def f():\n    return 'new'\n\ndef g():\n    pass\n\nraise ValueError('boom')\n");
  RegisterResult r = Register(bad, registry, Owner{"d", 2});
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->category, FailureCategory::kRuntimeError);
  EXPECT_EQ(r.failure->stage, Stage::kRegister);
  EXPECT_NE(r.failure->detail.find("ValueError: boom"), std::string::npos);
  EXPECT_EQ(registry.Names(), std::vector<std::string>{"f"});
  EXPECT_EQ(Resolve(registry, "f").callable->meta.directive_version, 1);
}

TEST(RegisterTest, NoFunctions) {
  FunctionRegistry registry;
  CompiledUnit unit = Compile("x = 1\nclass A:\n    def m(self):\n        pass\n");
  RegisterResult r = Register(unit, registry, Owner{"d", 1});
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->category, FailureCategory::kMissingEntryPoint);
  EXPECT_EQ(r.failure->detail, "no functions defined");
  EXPECT_EQ(registry.size(), 0u);
}

TEST(RegisterTest, RequiredNameMissing) {
  FunctionRegistry registry;
  CompiledUnit unit = Compile("def solution():\n    pass\n");
  RegisterOptions options;
  options.required_name = "add";
  RegisterResult r = Register(unit, registry, Owner{"d", 1}, options);
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->category, FailureCategory::kMissingEntryPoint);
  EXPECT_EQ(r.failure->stage, Stage::kRegister);
  EXPECT_EQ(registry.size(), 0u);
}

TEST(RegisterTest, HelperAndEntryPoint) {
  FunctionRegistry registry;
  CompiledUnit unit = Compile(
      "def helper(x):\n    return x * 2\n\n"
      "def onOpenDynamic(self):\n    return helper(21)\n");
  RegisterResult r = Register(unit, registry, Owner{"open_file", 1});
  std::sort(r.names.begin(), r.names.end());
  EXPECT_EQ(r.names, (std::vector<std::string>{"helper", "onOpenDynamic"}));
  EXPECT_TRUE(Resolve(registry, "helper").callable);
  EXPECT_TRUE(Resolve(registry, "onOpenDynamic").callable);
}

TEST(RegisterTest, BlocksSeeEachOther) {
  FunctionRegistry registry;
  CompiledUnit a = Compile("def double(x):\n    return 2 * x\n");
  CompiledUnit b = Compile("def quad(x):\n    return double(double(x))\n");
  Register(a, registry, Owner{"a", 1});
  Register(b, registry, Owner{"b", 1});
  Sandbox sandbox;
  EXPECT_EQ(sandbox.InvokeJson(*Resolve(registry, "quad").callable, json::array({3}), 2000).value, 12);
  // A later rebinding of `double` is what `quad` sees.
  CompiledUnit a2 = Compile("def double(x):\n    return 3 * x\n");
  Register(a2, registry, Owner{"a", 2});
  EXPECT_EQ(sandbox.InvokeJson(*Resolve(registry, "quad").callable, json::array({3}), 2000).value, 27);
}

TEST(RegisterTest, ReplacementCarriesNewMetadata) {
  FunctionRegistry registry;
  CompiledUnit v1 = Compile("def f():\n    return 1\n");
  CompiledUnit v2 = Compile("def f():\n    return 2\n");
  Register(v1, registry, Owner{"d", 1});
  Register(v2, registry, Owner{"d", 2});
  Callable c = *Resolve(registry, "f").callable;
  EXPECT_EQ(c.meta.directive_version, 2);
  EXPECT_EQ(c.meta.source_hash, v2.source_hash);
  EXPECT_NE(v1.source_hash, v2.source_hash);
}

TEST(RegisterTest, ReplacementHasNoUnboundWindow) {
  FunctionRegistry registry;
  CompiledUnit seed = Compile("def f():\n    return 0\n");
  Register(seed, registry, Owner{"d", 1});
  std::atomic<bool> done{false};
  std::atomic<int> misses{0};
  std::thread reader([&] {
    while (!done) {
      if (!registry.Find("f")) ++misses;
    }
  });
  for (int v = 2; v < 60; ++v) {
    CompiledUnit unit = Compile("def f():\n    return " + std::to_string(v) + "\n");
    Register(unit, registry, Owner{"d", v});
  }
  done = true;
  reader.join();
  EXPECT_EQ(misses.load(), 0);
}

TEST(RegisterTest, TrialRunCatchesTopLevelLoop) {
  FunctionRegistry registry;
  Sandbox sandbox;
  CompiledUnit unit = Compile("def f():\n    pass\n\nwhile True:\n    pass\n");
  RegisterOptions options;
  options.trial_sandbox = &sandbox;
  options.trial_timeout_ms = 200;
  RegisterResult r = Register(unit, registry, Owner{"d", 1}, options);
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->category, FailureCategory::kTimeout);
  EXPECT_EQ(r.failure->stage, Stage::kRegister);
  EXPECT_EQ(registry.size(), 0u);

  CompiledUnit raises = Compile("def f():\n    pass\n\n1 / 0\n");
  RegisterResult r2 = Register(raises, registry, Owner{"d", 1}, options);
  EXPECT_EQ(r2.failure->category, FailureCategory::kRuntimeError);
  EXPECT_EQ(registry.size(), 0u);
}

TEST(RegisterTest, ConditionalModuleScopeDefIsBound) {
  FunctionRegistry registry;
  CompiledUnit unit = Compile("import sys\nif sys.version_info >= (3,):\n    def f():\n        return 1\n");
  EXPECT_EQ(Register(unit, registry, Owner{"d", 1}).names, std::vector<std::string>{"f"});
}

TEST(ResolveTest, MissingEntryPoint) {
  FunctionRegistry registry;
  ResolveResult empty = Resolve(registry, "add");
  ASSERT_TRUE(empty.failure);
  EXPECT_EQ(empty.failure->category, FailureCategory::kMissingEntryPoint);
  EXPECT_EQ(empty.failure->stage, Stage::kInvoke);

  CompiledUnit unit = Compile("def test_24():\n    pass\n");
  Register(unit, registry, Owner{"d", 1});
  EXPECT_EQ(Resolve(registry, "test24").failure->category, FailureCategory::kMissingEntryPoint);
  EXPECT_TRUE(Resolve(registry, "test_24").callable);
}

TEST(HostPreludeTest, ReceiverAndEffects) {
  testing::TempDir dir;
  testing::WriteFile(dir / "host.py",
                     "class App:\n    def __init__(self):\n        self.log = []\n"
                     "app = App()\n__dco_receiver__ = app\n"
                     "GREETING = 'hi'\n"
                     "def __dco_report__():\n    return {'log': app.log}\n");
  FunctionRegistry registry(dir / "host.py");
  CompiledUnit unit = Compile(
      "def act(self, who):\n    self.log.append(GREETING + ' ' + who)\n    return len(self.log)\n"
      "\ndef plain(x):\n    return x\n");
  Register(unit, registry, Owner{"d", 1});
  Sandbox sandbox;
  InvocationOutcome out = sandbox.InvokeJson(*Resolve(registry, "act").callable, json::array({"bob"}), 2000);
  ASSERT_EQ(out.status, InvocationStatus::kOk) << out.error_message;
  EXPECT_EQ(out.value, 1);
  EXPECT_EQ(out.effects, (json{{"log", {"hi bob"}}}));
  EXPECT_EQ(sandbox.InvokeJson(*Resolve(registry, "plain").callable, json::array({7}), 2000).value, 7);
}

TEST(HostPreludeTest, Errors) {
  EXPECT_THROW(FunctionRegistry("/nonexistent/host.py"), Error);
  testing::TempDir dir;
  testing::WriteFile(dir / "bad.py", "raise RuntimeError('no')\n");
  EXPECT_THROW(FunctionRegistry(dir / "bad.py"), Error);
}

// Names an oracle finds by scanning column-0 definition lines must all be
// registered and resolvable; nothing else is.
TEST(RegisterPropertyTest, CompletenessAgainstLineScan) {
  std::mt19937 rng(31);
  const std::vector<std::string> filler = {
      "X = 1", "class K:\n    def method(self):\n        return 1",
      "def outer_{n}():\n    def inner_{n}():\n        return 1\n    return inner_{n}",
      "async def co_{n}():\n    return 1", "def f_{n}(a, b=2, *c, **d):\n    return a",
      "lam_{n} = lambda: 1", "alias_{n} = len",
      "s_{n} = '''\ndef not_a_def_{n}():\n    pass\n'''", "def plain_{n}():\n    '''doc'''"};
  for (int trial = 0; trial < 150; ++trial) {
    std::string src;
    const int parts = 1 + static_cast<int>(rng() % 6);
    for (int p = 0; p < parts; ++p) {
      std::string piece = filler[rng() % filler.size()];
      for (std::size_t at; (at = piece.find("{n}")) != std::string::npos;) {
        piece.replace(at, 3, std::to_string(trial) + "_" + std::to_string(p));
      }
      src += piece + "\n\n";
    }
    // Oracle: column-0 `def name(` / `async def name(` lines outside strings.
    std::vector<std::string> oracle;
    bool in_string = false;
    std::istringstream lines(src);
    for (std::string line; std::getline(lines, line);) {
      const bool starts_in_string = in_string;
      for (std::size_t at = 0; (at = line.find("'''", at)) != std::string::npos; at += 3) {
        in_string = !in_string;
      }
      if (starts_in_string) continue;
      for (std::string kw : {"def ", "async def "}) {
        if (line.rfind(kw, 0) == 0) oracle.push_back(line.substr(kw.size(), line.find('(') - kw.size()));
      }
    }
    std::sort(oracle.begin(), oracle.end());

    FunctionRegistry registry;
    CompiledUnit unit = Compile(src);
    RegisterResult r = Register(unit, registry, Owner{"p", 1});
    if (oracle.empty()) {
      EXPECT_EQ(r.failure->detail, "no functions defined");
      continue;
    }
    ASSERT_FALSE(r.failure) << src;
    std::vector<std::string> names = r.names;
    std::sort(names.begin(), names.end());
    EXPECT_EQ(names, oracle) << src;
    EXPECT_EQ(registry.Names(), oracle);
    for (const auto& n : oracle) EXPECT_TRUE(Resolve(registry, n).callable) << n;
  }
}

}  // namespace
}  // namespace dco
