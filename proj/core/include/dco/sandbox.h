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

#ifndef DCO_SANDBOX_H_
#define DCO_SANDBOX_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "dco/code_loader.h"
#include "dco/directive_store.h"
#include "dco/failure.h"
#include "dco/python_runtime.h"

namespace dco {

// Module names implicitly allowed under the deny policy.
using StdModules = std::unordered_set<std::string>;

// One name per line; '#' starts a comment. Throws Error(kFileNotFound).
StdModules LoadStdModules(const std::filesystem::path& path);
StdModules ParseStdModules(std::string_view text);
// The list shipped in data/std_modules.txt, compiled in.
const StdModules& DefaultStdModules();

struct ImportScanResult {
  std::vector<std::string> imports;     // Dotted names, source order.
  std::vector<std::string> violations;  // Subset of imports, source order, unique.
};

// Finds imports at any nesting depth: every line whose first token is
// `import` or `from`, outside triple-quoted strings. A name is allowed when
// its top-level package is in `std_modules` or it (or its top-level package)
// is in `allowlist`. Relative imports are listed but always allowed.
ImportScanResult ScanImports(std::string_view source, const std::vector<std::string>& allowlist,
                             const StdModules& std_modules);

struct PolicyResult {
  std::optional<std::string> source;
  std::optional<FailureRecord> failure;  // DisallowedImport, deny only
};

// deny: unchanged when clean, else a failure naming the violators.
// strip: violating import lines deleted, all other lines byte-identical.
// allow: unchanged.
PolicyResult ApplyPolicy(std::string_view source, const GenerationPolicy& policy,
                         const StdModules& std_modules);

enum class InvocationStatus { kOk, kTimeout, kRuntimeError };

std::string_view ToString(InvocationStatus status);

struct InvocationOutcome {
  InvocationStatus status = InvocationStatus::kRuntimeError;
  nlohmann::json value;       // kOk only; non-JSON values arrive as repr().
  std::string error_message;  // kRuntimeError only.
  std::string error_type;     // Python exception class name, when known.
  std::int64_t elapsed_ms = 0;
  nlohmann::json effects;     // Host report, null when the host has none.
};

nlohmann::json ToJson(const InvocationOutcome& outcome);

struct SandboxOptions {
  int max_workers = 4;
  StdModules std_modules = DefaultStdModules();
};

// Runs generated code in killable worker processes, at most max_workers at
// a time. A guarded call never throws; its fate is in the outcome.
class Sandbox {
 public:
  explicit Sandbox(SandboxOptions options = {});

  Sandbox(const Sandbox&) = delete;
  Sandbox& operator=(const Sandbox&) = delete;

  InvocationOutcome Invoke(const Callable& callable, const std::vector<python::Handle>& args,
                           int timeout_ms);
  // `args` must be a JSON array.
  InvocationOutcome InvokeJson(const Callable& callable, const nlohmann::json& args,
                               int timeout_ms);

  // Runs `body` in a worker slot; used for trial execution of block tops.
  python::ForkResult RunInWorker(const std::function<std::string()>& body, int timeout_ms);

  const StdModules& std_modules() const { return options_.std_modules; }
  int max_workers() const { return options_.max_workers; }

 private:
  SandboxOptions options_;
  std::unique_ptr<std::counting_semaphore<>> slots_;
};

}  // namespace dco

#endif  // DCO_SANDBOX_H_
