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

#ifndef DCO_CODE_LOADER_H_
#define DCO_CODE_LOADER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "dco/failure.h"
#include "dco/python_runtime.h"
#include "dco/time_util.h"

namespace dco {

class Sandbox;

// A compiled code object. Python separates compilation from execution, so no
// top-level statement of the block has run yet; that happens in Register.
struct CompiledUnit {
  std::string source;
  std::string source_hash;  // SHA-256 hex of `source`.
  std::string filename;     // Code-object filename, unique per source hash.
  python::Handle code;
  std::vector<std::string> defined_names;  // Filled by Register.
};

struct CompileResult {
  std::optional<CompiledUnit> unit;
  std::optional<FailureRecord> failure;  // CompileError, detail "line N: msg"
  int error_line = 0;
};

CompileResult CompileBlock(std::string_view source);

struct Owner {
  std::string directive_id;
  std::int64_t directive_version = 0;
};

struct BindingMetadata {
  std::string directive_id;
  std::int64_t directive_version = 0;
  std::string source_hash;
  TimestampMs registered_at = 0;
};

struct Callable {
  std::string name;
  python::Handle fn;
  // From the host prelude: `__dco_receiver__` is passed as `self` to
  // functions whose first parameter is named self; `__dco_report__()` is
  // called after each guarded call and its result reported as effects.
  python::Handle receiver;
  python::Handle reporter;
  BindingMetadata meta;
};

// Live mapping from function names to callables. Generated code sees the
// bound names as globals, so blocks can call each other.
class FunctionRegistry {
 public:
  // Runs the optional host prelude (the skeleton application) to build the
  // namespace generated code executes against. Throws Error(kFileNotFound)
  // or Error(kInvalidArgument) when the prelude fails.
  explicit FunctionRegistry(std::optional<std::filesystem::path> host_prelude = std::nullopt);
  ~FunctionRegistry();

  FunctionRegistry(const FunctionRegistry&) = delete;
  FunctionRegistry& operator=(const FunctionRegistry&) = delete;

  std::optional<Callable> Find(std::string_view name) const;
  std::vector<std::string> Names() const;
  std::size_t size() const;

 private:
  friend struct RegistryAccess;

  mutable std::shared_mutex mu_;
  std::map<std::string, Callable, std::less<>> bindings_;
  python::Handle bound_;  // dict name -> function, read by block scopes
  python::Handle host_;   // host namespace dict
  python::Handle receiver_;
  python::Handle reporter_;
};

struct RegisterOptions {
  // When set, the top level first runs in a sandbox worker with this
  // timeout; the host only executes blocks whose trial run finished.
  Sandbox* trial_sandbox = nullptr;
  int trial_timeout_ms = 2000;
  // When set, the block must define this function.
  std::optional<std::string> required_name;
};

struct RegisterResult {
  std::vector<std::string> names;
  std::optional<FailureRecord> failure;
};

// Executes the unit's top level in a fresh scope and binds every top-level
// function it defines. On any failure the registry is left untouched.
RegisterResult Register(CompiledUnit& unit, FunctionRegistry& registry, const Owner& owner,
                        const RegisterOptions& options = {});

struct ResolveResult {
  std::optional<Callable> callable;
  std::optional<FailureRecord> failure;  // MissingEntryPoint
};

ResolveResult Resolve(const FunctionRegistry& registry, std::string_view entry_point);

}  // namespace dco

#endif  // DCO_CODE_LOADER_H_
