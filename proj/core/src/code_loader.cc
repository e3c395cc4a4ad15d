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
#include <fstream>
#include <mutex>
#include <sstream>

#include <pybind11/stl.h>

#include "dco/error.h"
#include "dco/hash.h"
#include "dco/sandbox.h"

namespace py = pybind11;

namespace dco {

struct RegistryAccess {
  static std::shared_mutex& mu(FunctionRegistry& r) { return r.mu_; }
  static auto& bindings(FunctionRegistry& r) { return r.bindings_; }
  static const python::Handle& bound(const FunctionRegistry& r) { return r.bound_; }
  static const python::Handle& host(const FunctionRegistry& r) { return r.host_; }
  static const python::Handle& receiver(const FunctionRegistry& r) { return r.receiver_; }
  static const python::Handle& reporter(const FunctionRegistry& r) { return r.reporter_; }
};

namespace {

FailureRecord Fail(FailureCategory category, std::string detail, Stage stage) {
  return {category, std::move(detail), stage};
}

std::string BlockModuleName(const std::string& hash) { return "dco_block_" + hash.substr(0, 16); }

std::string JoinNames(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

CompileResult CompileBlock(std::string_view source) {
  CompileResult result;
  if (source.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    result.failure = Fail(FailureCategory::kCompileError, "empty source", Stage::kCompile);
    return result;
  }
  python::EnsureInitialized();
  CompiledUnit unit;
  unit.source = std::string(source);
  unit.source_hash = Sha256Hex(source);
  unit.filename = "<dco-block-" + unit.source_hash.substr(0, 16) + ">";

  python::GilGuard gil;
  try {
    py::object code = py::module_::import("builtins")
                          .attr("compile")(unit.source, unit.filename, "exec", 0, true);
    unit.code = python::Handle(std::move(code));
  } catch (py::error_already_set& e) {
    std::string message;
    int line = 0;
    if (e.matches(PyExc_SyntaxError)) {
      py::object value = e.value();
      py::object lineno = value.attr("lineno");
      if (!lineno.is_none()) line = lineno.cast<int>();
      py::object msg = value.attr("msg");
      message = py::str(msg).cast<std::string>();
    } else {
      message = e.what();
    }
    result.error_line = line;
    result.failure = Fail(FailureCategory::kCompileError,
                          "line " + std::to_string(line) + ": " + message, Stage::kCompile);
    return result;
  }
  result.unit = std::move(unit);
  return result;
}

FunctionRegistry::FunctionRegistry(std::optional<std::filesystem::path> host_prelude) {
  python::EnsureInitialized();
  std::string prelude_source;
  if (host_prelude) {
    std::ifstream in(*host_prelude, std::ios::binary);
    if (!in) throw Error(ErrorCode::kFileNotFound, host_prelude->string());
    std::stringstream ss;
    ss << in.rdbuf();
    prelude_source = ss.str();
  }
  python::GilGuard gil;
  py::dict host;
  host["__builtins__"] = py::module_::import("builtins");
  host["__name__"] = "__dco_host__";
  if (host_prelude) {
    host["__file__"] = std::filesystem::absolute(*host_prelude).string();
    try {
      py::object code = py::module_::import("builtins")
                            .attr("compile")(prelude_source, host_prelude->string(), "exec");
      py::module_::import("builtins").attr("exec")(code, host);
    } catch (py::error_already_set& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  "host prelude " + host_prelude->string() + " failed: " + e.what());
    }
  }
  if (host.contains("__dco_receiver__")) receiver_ = python::Handle(host["__dco_receiver__"]);
  if (host.contains("__dco_report__")) reporter_ = python::Handle(host["__dco_report__"]);
  bound_ = python::Handle(py::dict());
  host_ = python::Handle(std::move(host));
}

FunctionRegistry::~FunctionRegistry() = default;

std::optional<Callable> FunctionRegistry::Find(std::string_view name) const {
  std::shared_lock lock(mu_);
  auto it = bindings_.find(name);
  if (it == bindings_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> FunctionRegistry::Names() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> names;
  names.reserve(bindings_.size());
  for (const auto& [name, _] : bindings_) names.push_back(name);
  return names;
}

std::size_t FunctionRegistry::size() const {
  std::shared_lock lock(mu_);
  return bindings_.size();
}

RegisterResult Register(CompiledUnit& unit, FunctionRegistry& registry, const Owner& owner,
                        const RegisterOptions& options) {
  RegisterResult result;
  const std::string module_name = BlockModuleName(unit.source_hash);

  if (options.trial_sandbox != nullptr) {
    const auto& bound = RegistryAccess::bound(registry);
    const auto& host = RegistryAccess::host(registry);
    python::ForkResult trial = options.trial_sandbox->RunInWorker(
        [&]() -> std::string {
          return python::Helpers()
              .attr("trial_exec")(unit.code.get(), bound.get(), host.get(), module_name,
                                  unit.filename)
              .cast<std::string>();
        },
        options.trial_timeout_ms);
    switch (trial.status) {
      case python::ForkResult::Status::kTimedOut:
        result.failure = Fail(FailureCategory::kTimeout,
                              "top-level execution exceeded " +
                                  std::to_string(options.trial_timeout_ms) + " ms",
                              Stage::kRegister);
        return result;
      case python::ForkResult::Status::kCrashed:
        result.failure = Fail(FailureCategory::kRuntimeError, trial.detail, Stage::kRegister);
        return result;
      case python::ForkResult::Status::kCompleted: {
        auto reply = nlohmann::json::parse(trial.payload, nullptr, false);
        if (!reply.is_object() || reply.value("status", "") != "ok") {
          std::string detail = reply.is_object() ? reply.value("error", "trial failed")
                                                 : "malformed trial result";
          result.failure = Fail(FailureCategory::kRuntimeError, detail, Stage::kRegister);
          return result;
        }
        break;
      }
    }
  }

  std::unique_lock lock(RegistryAccess::mu(registry));
  python::GilGuard gil;
  py::object scope = python::Helpers().attr("new_scope")(
      RegistryAccess::bound(registry).get(), RegistryAccess::host(registry).get(), module_name);
  try {
    py::module_::import("builtins").attr("exec")(unit.code.get(), scope);
  } catch (py::error_already_set& e) {
    std::string detail = python::Helpers().attr("describe")(e.value()).cast<std::string>();
    result.failure = Fail(FailureCategory::kRuntimeError, detail, Stage::kRegister);
    return result;
  }
  std::vector<std::string> names =
      python::Helpers().attr("harvest")(scope, unit.filename).cast<std::vector<std::string>>();
  if (names.empty()) {
    result.failure = Fail(FailureCategory::kMissingEntryPoint, "no functions defined",
                          Stage::kRegister);
    return result;
  }
  if (options.required_name &&
      std::find(names.begin(), names.end(), *options.required_name) == names.end()) {
    result.failure = Fail(FailureCategory::kMissingEntryPoint,
                          "entry point \"" + *options.required_name +
                              "\" not defined (defined: " + JoinNames(names) + ")",
                          Stage::kRegister);
    return result;
  }

  py::dict bound = RegistryAccess::bound(registry).get();
  py::dict scope_dict = scope;
  const TimestampMs now = NowMs();
  auto& bindings = RegistryAccess::bindings(registry);
  for (const auto& name : names) {
    py::object fn = scope_dict[py::str(name)];
    bound[py::str(name)] = fn;
    Callable callable;
    callable.name = name;
    callable.fn = python::Handle(fn);
    callable.receiver = RegistryAccess::receiver(registry);
    callable.reporter = RegistryAccess::reporter(registry);
    callable.meta = {owner.directive_id, owner.directive_version, unit.source_hash, now};
    bindings.insert_or_assign(name, std::move(callable));
  }
  unit.defined_names = names;
  result.names = std::move(names);
  return result;
}

ResolveResult Resolve(const FunctionRegistry& registry, std::string_view entry_point) {
  ResolveResult result;
  if (auto callable = registry.Find(entry_point)) {
    result.callable = std::move(callable);
  } else {
    result.failure = Fail(FailureCategory::kMissingEntryPoint,
                          "function \"" + std::string(entry_point) + "\" not found or not callable",
                          Stage::kInvoke);
  }
  return result;
}

}  // namespace dco
