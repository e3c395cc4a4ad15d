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

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dco/error.h"

namespace py = pybind11;

namespace dco {

namespace internal {
extern const std::string_view kDefaultStdModulesText;
}  // namespace internal

namespace {

struct ImportStatement {
  std::size_t first_line;
  std::size_t last_line;  // Inclusive; > first_line for continued statements.
  std::vector<std::string> modules;
};

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start + 1));  // keeps '\n'
    start = nl + 1;
  }
  return lines;
}

std::string_view Trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool IsModuleName(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
          c == '_' || c == '.')) {
      return false;
    }
  }
  return true;
}

std::vector<std::string_view> Words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) words.push_back(s.substr(i, j - i));
    i = j;
  }
  return words;
}

// Code part of a line: stops at a comment, blanks out string contents.
// Tracks triple-quoted strings across lines through `triple`.
std::string CodeOf(std::string_view line, std::string& triple) {
  std::string code;
  std::size_t i = 0;
  while (i < line.size()) {
    if (!triple.empty()) {
      auto close = line.find(triple, i);
      if (close == std::string_view::npos) return code;
      i = close + 3;
      triple.clear();
      code += "\"\"";
      continue;
    }
    char c = line[i];
    if (c == '#') break;
    if (c == '"' || c == '\'') {
      if (line.substr(i, 3) == std::string(3, c)) {
        triple = std::string(3, c);
        i += 3;
        continue;
      }
      std::size_t j = i + 1;
      while (j < line.size() && line[j] != c && line[j] != '\n') {
        if (line[j] == '\\') ++j;
        ++j;
      }
      code += "\"\"";
      i = j + 1;
      continue;
    }
    code.push_back(c);
    ++i;
  }
  return code;
}

std::vector<std::string> ModulesOfStatement(std::string_view stmt) {
  std::vector<std::string> modules;
  stmt = Trim(stmt);
  auto words = Words(stmt);
  if (words.empty()) return modules;
  if (words[0] == "from") {
    if (words.size() >= 3 && words[2].substr(0, 6) == "import" && IsModuleName(words[1])) {
      modules.emplace_back(words[1]);
    }
  } else if (words[0] == "import") {
    std::string_view rest = Trim(stmt.substr(6));
    std::size_t start = 0;
    while (start <= rest.size()) {
      auto comma = rest.find(',', start);
      std::string_view part =
          Trim(rest.substr(start, comma == std::string_view::npos ? rest.npos : comma - start));
      auto part_words = Words(part);
      if (!part_words.empty() && IsModuleName(part_words[0])) {
        modules.emplace_back(part_words[0]);
      }
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  return modules;
}

std::vector<ImportStatement> FindImports(std::string_view source,
                                         const std::vector<std::string_view>& lines) {
  (void)source;
  std::vector<ImportStatement> found;
  std::string triple;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const bool inside_string = !triple.empty();
    std::string code = CodeOf(lines[i], triple);
    if (inside_string) continue;
    std::size_t last = i;
    // Parenthesized or backslash-continued statements span several lines.
    int depth = static_cast<int>(std::count(code.begin(), code.end(), '(')) -
                static_cast<int>(std::count(code.begin(), code.end(), ')'));
    std::string full = code;
    auto continued = [](std::string_view c) { return !Trim(c).empty() && Trim(c).back() == '\\'; };
    while (last + 1 < lines.size() && (depth > 0 || continued(code))) {
      if (continued(code)) full.erase(full.rfind('\\'), 1);
      ++last;
      code = CodeOf(lines[last], triple);
      depth += static_cast<int>(std::count(code.begin(), code.end(), '(')) -
               static_cast<int>(std::count(code.begin(), code.end(), ')'));
      full += " " + code;
    }
    std::vector<std::string> modules;
    std::size_t start = 0;
    while (start <= full.size()) {
      auto semi = full.find(';', start);
      auto stmt = std::string_view(full).substr(
          start, semi == std::string::npos ? std::string::npos : semi - start);
      for (auto& m : ModulesOfStatement(stmt)) modules.push_back(std::move(m));
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
    if (!modules.empty()) found.push_back({i, last, std::move(modules)});
    i = last;
  }
  return found;
}

bool IsAllowed(const std::string& module, const std::vector<std::string>& allowlist,
               const StdModules& std_modules) {
  if (module.empty() || module.front() == '.') return true;
  const std::string top = module.substr(0, module.find('.'));
  if (std_modules.count(top)) return true;
  return std::find(allowlist.begin(), allowlist.end(), module) != allowlist.end() ||
         std::find(allowlist.begin(), allowlist.end(), top) != allowlist.end();
}

FailureRecord Disallowed(const std::vector<std::string>& violations) {
  std::string detail = "disallowed imports: ";
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) detail += ", ";
    detail += violations[i];
  }
  return {FailureCategory::kDisallowedImport, detail, Stage::kGuard};
}

// Holds one worker slot for its lifetime.
class SlotLease {
 public:
  explicit SlotLease(std::counting_semaphore<>& slots) : slots_(slots) { slots_.acquire(); }
  ~SlotLease() { slots_.release(); }
  SlotLease(const SlotLease&) = delete;
  SlotLease& operator=(const SlotLease&) = delete;

 private:
  std::counting_semaphore<>& slots_;
};

}  // namespace

StdModules ParseStdModules(std::string_view text) {
  StdModules modules;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto name = Trim(line);
    if (!name.empty()) modules.emplace(name);
  }
  return modules;
}

StdModules LoadStdModules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseStdModules(ss.str());
}

const StdModules& DefaultStdModules() {
  static const StdModules modules = ParseStdModules(internal::kDefaultStdModulesText);
  return modules;
}

ImportScanResult ScanImports(std::string_view source, const std::vector<std::string>& allowlist,
                             const StdModules& std_modules) {
  ImportScanResult result;
  const auto lines = SplitLines(source);
  for (const auto& stmt : FindImports(source, lines)) {
    for (const auto& module : stmt.modules) {
      result.imports.push_back(module);
      if (!IsAllowed(module, allowlist, std_modules) &&
          std::find(result.violations.begin(), result.violations.end(), module) ==
              result.violations.end()) {
        result.violations.push_back(module);
      }
    }
  }
  return result;
}

PolicyResult ApplyPolicy(std::string_view source, const GenerationPolicy& policy,
                         const StdModules& std_modules) {
  PolicyResult result;
  switch (policy.import_policy) {
    case ImportPolicy::kAllow:
      result.source = std::string(source);
      return result;
    case ImportPolicy::kDeny: {
      auto scan = ScanImports(source, policy.allowlist, std_modules);
      if (scan.violations.empty()) {
        result.source = std::string(source);
      } else {
        result.failure = Disallowed(scan.violations);
      }
      return result;
    }
    case ImportPolicy::kStrip: {
      const auto lines = SplitLines(source);
      std::vector<bool> drop(lines.size(), false);
      for (const auto& stmt : FindImports(source, lines)) {
        bool violating = std::any_of(stmt.modules.begin(), stmt.modules.end(),
                                     [&](const std::string& m) {
                                       return !IsAllowed(m, policy.allowlist, std_modules);
                                     });
        if (!violating) continue;
        for (std::size_t i = stmt.first_line; i <= stmt.last_line; ++i) drop[i] = true;
      }
      std::string out;
      out.reserve(source.size());
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!drop[i]) out.append(lines[i]);
      }
      result.source = std::move(out);
      return result;
    }
  }
  return result;
}

std::string_view ToString(InvocationStatus status) {
  switch (status) {
    case InvocationStatus::kOk: return "ok";
    case InvocationStatus::kTimeout: return "timeout";
    case InvocationStatus::kRuntimeError: return "runtime_error";
  }
  return "?";
}

nlohmann::json ToJson(const InvocationOutcome& outcome) {
  nlohmann::json j = {{"status", ToString(outcome.status)}, {"elapsed_ms", outcome.elapsed_ms}};
  if (outcome.status == InvocationStatus::kOk) j["value"] = outcome.value;
  if (outcome.status == InvocationStatus::kRuntimeError) {
    j["error_message"] = outcome.error_message;
    if (!outcome.error_type.empty()) j["error_type"] = outcome.error_type;
  }
  if (!outcome.effects.is_null()) j["effects"] = outcome.effects;
  return j;
}

Sandbox::Sandbox(SandboxOptions options)
    : options_(std::move(options)),
      slots_(std::make_unique<std::counting_semaphore<>>(std::max(1, options_.max_workers))) {
  options_.max_workers = std::max(1, options_.max_workers);
}

python::ForkResult Sandbox::RunInWorker(const std::function<std::string()>& body,
                                        int timeout_ms) {
  SlotLease lease(*slots_);
  return python::RunForked(body, std::max(1, timeout_ms));
}

InvocationOutcome Sandbox::Invoke(const Callable& callable,
                                  const std::vector<python::Handle>& args, int timeout_ms) {
  const auto body = [&]() -> std::string {
    py::list py_args;
    for (const auto& a : args) py_args.append(a.get());
    return python::Helpers()
        .attr("call")(callable.fn.get(), py_args, callable.receiver.get(),
                      callable.reporter.get())
        .cast<std::string>();
  };
  python::ForkResult run = RunInWorker(body, timeout_ms);

  InvocationOutcome outcome;
  outcome.elapsed_ms = run.elapsed_ms;
  switch (run.status) {
    case python::ForkResult::Status::kTimedOut:
      outcome.status = InvocationStatus::kTimeout;
      return outcome;
    case python::ForkResult::Status::kCrashed:
      outcome.status = InvocationStatus::kRuntimeError;
      outcome.error_message = run.detail;
      return outcome;
    case python::ForkResult::Status::kCompleted:
      break;
  }
  auto reply = nlohmann::json::parse(run.payload, nullptr, false);
  if (!reply.is_object()) {
    outcome.status = InvocationStatus::kRuntimeError;
    outcome.error_message = "malformed worker reply";
    return outcome;
  }
  if (reply.value("status", "") == "ok") {
    outcome.status = InvocationStatus::kOk;
    outcome.value = reply.contains("value") ? reply["value"] : nlohmann::json();
  } else {
    outcome.status = InvocationStatus::kRuntimeError;
    outcome.error_message = reply.value("error", "");
    outcome.error_type = reply.value("error_type", "");
  }
  if (reply.contains("effects")) outcome.effects = reply["effects"];
  return outcome;
}

InvocationOutcome Sandbox::InvokeJson(const Callable& callable, const nlohmann::json& args,
                                      int timeout_ms) {
  if (!args.is_array()) throw Error(ErrorCode::kInvalidArgument, "args must be a JSON array");
  python::EnsureInitialized();
  std::vector<python::Handle> handles;
  {
    python::GilGuard gil;
    for (const auto& a : args) handles.emplace_back(python::FromJson(a));
  }
  return Invoke(callable, handles, timeout_ms);
}

}  // namespace dco
