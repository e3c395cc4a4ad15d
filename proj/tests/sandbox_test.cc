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

#include "dco/sandbox.h"

#include <sys/wait.h>

#include <chrono>
#include <set>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include <pybind11/embed.h>
#include <pybind11/stl.h>

#include "dco/code_loader.h"
#include "dco/error.h"
#include "test_util.h"

namespace dco {
namespace {

namespace py = pybind11;
using nlohmann::json;

// Compiles `source` into a private registry and returns `name`.
class Block {
 public:
  explicit Block(const std::string& source) {
    CompileResult compiled = CompileBlock(source);
    EXPECT_TRUE(compiled.unit) << source;
    RegisterResult r = Register(*compiled.unit, registry_, Owner{"test", 1});
    EXPECT_FALSE(r.failure) << (r.failure ? r.failure->detail : "");
  }
  Callable operator[](const std::string& name) const { return *Resolve(registry_, name).callable; }

 private:
  FunctionRegistry registry_;
};

GenerationPolicy Policy(ImportPolicy p, std::vector<std::string> allowlist = {}) {
  GenerationPolicy policy;
  policy.import_policy = p;
  policy.allowlist = std::move(allowlist);
  return policy;
}

TEST(ScanImportsTest, StdModuleIsClean) {
  auto r = ScanImports("import os\n", {}, DefaultStdModules());
  EXPECT_EQ(r.imports, std::vector<std::string>{"os"});
  EXPECT_TRUE(r.violations.empty());
}

TEST(ScanImportsTest, ThirdPartyIsViolation) {
  auto r = ScanImports("import os\nimport requests\n", {}, DefaultStdModules());
  EXPECT_EQ(r.violations, std::vector<std::string>{"requests"});
  PolicyResult p = ApplyPolicy("import requests\n", Policy(ImportPolicy::kDeny), DefaultStdModules());
  ASSERT_TRUE(p.failure);
  EXPECT_EQ(p.failure->category, FailureCategory::kDisallowedImport);
  EXPECT_EQ(p.failure->stage, Stage::kGuard);
  EXPECT_NE(p.failure->detail.find("requests"), std::string::npos);
}

TEST(ScanImportsTest, NestedImportsInWalkthroughListing) {
  auto r = ScanImports(testing::kWarningListing, {}, DefaultStdModules());
  EXPECT_EQ(r.imports, (std::vector<std::string>{"tkinter", "tkinter", "tkinter"}));
  EXPECT_TRUE(r.violations.empty());
  auto first = ScanImports(testing::kOpenFileListing, {}, StdModules{});
  EXPECT_EQ(first.violations, std::vector<std::string>{"tkinter"});
}

TEST(ScanImportsTest, StatementForms) {
  const std::string src =
      "import a.b as c, d\n"
      "from e.f import (g,\n"
      "    h)\n"
      "x = 1; import i\n"
      "from . import j\n"
      "from .k import l\n"
      "import m, \\\n"
      "    n\n"
      "# import commented\n"
      "s = '''\n"
      "import inside_string\n"
      "'''\n"
      "t = \"import not_a_statement\"\n"
      "def f():\n"
      "    if True:\n"
      "        from o import p\n";
  auto r = ScanImports(src, {}, StdModules{});
  EXPECT_EQ(r.imports,
            (std::vector<std::string>{"a.b", "d", "e.f", "i", ".", ".k", "m", "n", "o"}));
  EXPECT_EQ(r.violations, (std::vector<std::string>{"a.b", "d", "e.f", "i", "m", "n", "o"}));
}

TEST(ScanImportsTest, AllowlistMatchesPackageOrFullName) {
  auto r = ScanImports("import numpy.linalg\nimport scipy.stats\nimport pandas\n",
                       {"numpy", "scipy.stats"}, StdModules{});
  EXPECT_EQ(r.violations, std::vector<std::string>{"pandas"});
  auto dotted_std = ScanImports("import os.path\nfrom xml.etree import ElementTree\n", {},
                                DefaultStdModules());
  EXPECT_TRUE(dotted_std.violations.empty());
}

TEST(ScanImportsTest, ViolationsUniqueInSourceOrder) {
  auto r = ScanImports("import zz\nimport aa\nimport zz\n", {}, StdModules{});
  EXPECT_EQ(r.imports, (std::vector<std::string>{"zz", "aa", "zz"}));
  EXPECT_EQ(r.violations, (std::vector<std::string>{"zz", "aa"}));
}

TEST(ApplyPolicyTest, DenyCleanIsIdentity) {
  std::string src = "import math\n\ndef f(x):\n    return math.sqrt(x)\n";
  EXPECT_EQ(ApplyPolicy(src, Policy(ImportPolicy::kDeny), DefaultStdModules()).source, src);
}

TEST(ApplyPolicyTest, StripOneOfTen) {
  std::string src;
  for (int i = 0; i < 10; ++i) {
    src += i == 4 ? "    import requests\n" : "    x" + std::to_string(i) + " = " + std::to_string(i) + "  \n";
  }
  PolicyResult r = ApplyPolicy(src, Policy(ImportPolicy::kStrip), DefaultStdModules());
  ASSERT_TRUE(r.source);
  std::string expected;
  for (int i = 0; i < 10; ++i) {
    if (i != 4) expected += "    x" + std::to_string(i) + " = " + std::to_string(i) + "  \n";
  }
  EXPECT_EQ(*r.source, expected);
}

TEST(ApplyPolicyTest, AllowNeverFails) {
  std::string src = "import requests\nimport numpy\n";
  EXPECT_EQ(ApplyPolicy(src, Policy(ImportPolicy::kAllow), StdModules{}).source, src);
}

// The 4-import lattice: four import statements at increasing depth, each
// either a standard module or a third-party one. All 16 subsets, three
// policies, compared against Python's own ast module.
struct Slot {
  const char* std_line;
  const char* third_party_line;
};
constexpr Slot kSlots[4] = {
    {"import json", "import requests"},
    {"    from tkinter import filedialog", "    from numpy import array"},
    {"        import collections as c", "        import pandas as pd"},
    {"            import os.path", "            import yaml.loader"},
};

std::string LatticeSource(unsigned mask) {
  std::string s;
  s += std::string(mask & 1 ? kSlots[0].third_party_line : kSlots[0].std_line) + "\n";
  s += "\ndef onOpenDynamic(self):\n";
  s += std::string(mask & 2 ? kSlots[1].third_party_line : kSlots[1].std_line) + "\n";
  s += "    if self:\n";
  s += std::string(mask & 4 ? kSlots[2].third_party_line : kSlots[2].std_line) + "\n";
  s += "        for i in range(2):\n";
  s += std::string(mask & 8 ? kSlots[3].third_party_line : kSlots[3].std_line) + "\n";
  s += "            pass\n";
  s += "        return 1\n";
  s += "    return 0\n";
  return s;
}

struct AstImport {
  std::string module;
  int line;
};

std::vector<AstImport> AstImports(const std::string& source) {
  python::EnsureInitialized();
  python::GilGuard gil;
  py::dict scope;
  scope["src"] = source;
  py::exec(R"(
import ast
found = []
for node in ast.walk(ast.parse(src)):
    if isinstance(node, ast.Import):
        found += [(a.name, node.lineno) for a in node.names]
    elif isinstance(node, ast.ImportFrom):
        found.append(("." * node.level + (node.module or ""), node.lineno))
found.sort(key=lambda f: f[1])
)",
           scope);
  std::vector<AstImport> out;
  for (auto item : scope["found"]) {
    auto t = item.cast<py::tuple>();
    out.push_back({t[0].cast<std::string>(), t[1].cast<int>()});
  }
  return out;
}

bool StdOracle(const std::string& module) {
  python::GilGuard gil;
  std::string top = module.substr(0, module.find('.'));
  return py::module_::import("sys").attr("stdlib_module_names").contains(top);
}

TEST(ImportLatticeTest, SixteenCasesAgainstAst) {
  for (unsigned mask = 0; mask < 16; ++mask) {
    const std::string src = LatticeSource(mask);
    std::vector<AstImport> oracle = AstImports(src);
    ASSERT_EQ(oracle.size(), 4u);
    std::vector<std::string> want_imports, want_violations;
    std::set<int> violating_lines;
    for (const auto& imp : oracle) {
      want_imports.push_back(imp.module);
      if (!StdOracle(imp.module)) {
        want_violations.push_back(imp.module);
        violating_lines.insert(imp.line);
      }
    }
    ASSERT_EQ(want_violations.size(), static_cast<std::size_t>(__builtin_popcount(mask)));

    ImportScanResult scan = ScanImports(src, {}, DefaultStdModules());
    EXPECT_EQ(scan.imports, want_imports) << mask;
    EXPECT_EQ(scan.violations, want_violations) << mask;

    PolicyResult deny = ApplyPolicy(src, Policy(ImportPolicy::kDeny), DefaultStdModules());
    if (want_violations.empty()) {
      EXPECT_EQ(deny.source, src);
    } else {
      ASSERT_TRUE(deny.failure) << mask;
      std::string names;
      for (const auto& v : want_violations) names += (names.empty() ? "" : ", ") + v;
      EXPECT_EQ(deny.failure->detail, "disallowed imports: " + names);
    }

    std::string want_stripped;
    std::istringstream lines(src);
    std::string line;
    for (int n = 1; std::getline(lines, line); ++n) {
      if (!violating_lines.count(n)) want_stripped += line + "\n";
    }
    PolicyResult strip = ApplyPolicy(src, Policy(ImportPolicy::kStrip), DefaultStdModules());
    ASSERT_TRUE(strip.source);
    EXPECT_EQ(*strip.source, want_stripped) << mask;
    EXPECT_TRUE(CompileBlock(*strip.source).unit) << mask;

    EXPECT_EQ(ApplyPolicy(src, Policy(ImportPolicy::kAllow), DefaultStdModules()).source, src);
  }
}

TEST(StdModulesTest, ShippedListIsStandardLibrary) {
  const StdModules& mods = DefaultStdModules();
  EXPECT_GT(mods.size(), 150u);
  EXPECT_TRUE(mods.count("os"));
  EXPECT_TRUE(mods.count("tkinter"));
  EXPECT_FALSE(mods.count("numpy"));
  for (const auto& m : mods) EXPECT_TRUE(StdOracle(m)) << m;
  EXPECT_EQ(LoadStdModules(testing::SourcePath("data/std_modules.txt")), mods);
}

TEST(StdModulesTest, ParseSkipsComments) {
  EXPECT_EQ(ParseStdModules("# header\nos\n  sys  # trailing\n\n"), (StdModules{"os", "sys"}));
  EXPECT_THROW(LoadStdModules("/nonexistent/std.txt"), Error);
}

TEST(InvokeTest, ReturnsValue) {
  Block b("def add(a, b):\n    return a + b\n");
  Sandbox sandbox;
  InvocationOutcome out = sandbox.InvokeJson(b["add"], json::array({2, 3}), 2000);
  EXPECT_EQ(out.status, InvocationStatus::kOk);
  EXPECT_EQ(out.value, 5);
  EXPECT_LT(out.elapsed_ms, 2000);
  EXPECT_TRUE(out.effects.is_null());
}

TEST(InvokeTest, MarshalsJsonKinds) {
  Block b("def echo(x):\n    return x\n\ndef odd():\n    return {1, 2}\n");
  Sandbox sandbox;
  json value = {{"a", json::array({1, 2.5, "s", nullptr, true})}, {"b", json::object()}};
  EXPECT_EQ(sandbox.InvokeJson(b["echo"], json::array({value}), 2000).value, value);
  EXPECT_EQ(sandbox.InvokeJson(b["odd"], json::array(), 2000).value, "{1, 2}");
}

TEST(InvokeTest, DivisionByZero) {
  Block b("def f():\n    return 1 / 0\n");
  Sandbox sandbox;
  InvocationOutcome out = sandbox.InvokeJson(b["f"], json::array(), 2000);
  EXPECT_EQ(out.status, InvocationStatus::kRuntimeError);
  EXPECT_NE(out.error_message.find("division by zero"), std::string::npos);
  EXPECT_EQ(out.error_type, "ZeroDivisionError");
}

TEST(InvokeTest, InfiniteLoopTimesOut) {
  Block b("def spin():\n    while True:\n        pass\n");
  Sandbox sandbox;
  InvocationOutcome out = sandbox.InvokeJson(b["spin"], json::array(), 500);
  EXPECT_EQ(out.status, InvocationStatus::kTimeout);
  EXPECT_GE(out.elapsed_ms, 500);
  EXPECT_LE(out.elapsed_ms, 1500);
}

TEST(InvokeTest, WorkerEffectsStayInWorker) {
  Block b("state = []\n\ndef push():\n    state.append(1)\n    return len(state)\n");
  Sandbox sandbox;
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(sandbox.InvokeJson(b["push"], json::array(), 2000).value, 1);
  }
}

TEST(InvokeTest, ArgsMustBeArray) {
  Block b("def f():\n    return 1\n");
  Sandbox sandbox;
  EXPECT_THROW(sandbox.InvokeJson(b["f"], json::object(), 2000), Error);
}

TEST(InvokeTest, WorkerCapBoundsConcurrency) {
  Block b("import time\n\ndef nap():\n    time.sleep(0.3)\n    return 1\n");
  Sandbox sandbox(SandboxOptions{2, DefaultStdModules()});
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int i = 0; i < 4; ++i) {
    threads.emplace_back([&] {
      if (sandbox.InvokeJson(b["nap"], json::array(), 5000).status == InvocationStatus::kOk) ++ok;
    });
  }
  for (auto& t : threads) t.join();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(ok.load(), 4);
  EXPECT_GE(ms, 600);  // two waves of two
}

TEST(InvokeTest, RepeatedTimeoutsLeaveNoWorkers) {
  Block b("def spin():\n    while True:\n        pass\n");
  Sandbox sandbox;
  for (int i = 0; i < 20; ++i) {
    InvocationOutcome out = sandbox.InvokeJson(b["spin"], json::array(), 20);
    ASSERT_EQ(out.status, InvocationStatus::kTimeout);
    ASSERT_GE(out.elapsed_ms, 20);
  }
  // Every worker was reaped: there is no child left to wait for.
  EXPECT_EQ(::waitpid(-1, nullptr, WNOHANG), -1);
  EXPECT_EQ(errno, ECHILD);
}

}  // namespace
}  // namespace dco
