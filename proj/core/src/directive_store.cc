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

#include "dco/directive_store.h"

#include <fstream>
#include <mutex>
#include <sstream>

#include "dco/error.h"

namespace dco {
namespace {

using nlohmann::json;

bool IsBlank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

// Line numbers on which each element of the top-level "directives" array
// starts. JSON is already known to be well formed when this runs.
std::vector<int> DirectiveStartLines(std::string_view text) {
  std::vector<int> lines;
  int line = 1;
  int depth = 0;
  bool in_string = false;
  bool escape = false;
  for (char c : text) {
    if (c == '\n') ++line;
    if (in_string) {
      if (escape) {
        escape = false;
      } else if (c == '\\') {
        escape = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '{':
      case '[':
        ++depth;
        if (depth == 3 && c == '{') lines.push_back(line);
        break;
      case '}':
      case ']': --depth; break;
      default: break;
    }
  }
  return lines;
}

int LineOfOffset(std::string_view text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

template <typename Enum, std::size_t N>
Enum ParseEnum(const json& j, const char* field,
               const std::pair<std::string_view, Enum> (&names)[N]) {
  if (!j.is_string()) {
    throw Error(ErrorCode::kParseError, std::string(field) + " must be a string");
  }
  const auto& s = j.get_ref<const std::string&>();
  for (const auto& [name, value] : names) {
    if (name == s) return value;
  }
  throw Error(ErrorCode::kParseError,
              "unknown " + std::string(field) + " \"" + s + "\"");
}

constexpr std::pair<std::string_view, GenerationMode> kModes[] = {
    {"deterministic", GenerationMode::kDeterministic},
    {"diverse", GenerationMode::kDiverse}};
constexpr std::pair<std::string_view, CacheMode> kCacheModes[] = {
    {"cached", CacheMode::kCached}, {"ephemeral", CacheMode::kEphemeral}};
constexpr std::pair<std::string_view, ImportPolicy> kImportPolicies[] = {
    {"deny", ImportPolicy::kDeny},
    {"strip", ImportPolicy::kStrip},
    {"allow", ImportPolicy::kAllow}};

std::string RequireString(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) {
    throw Error(ErrorCode::kParseError, std::string("missing field \"") + field + "\"");
  }
  if (!it->is_string()) {
    throw Error(ErrorCode::kParseError, std::string(field) + " must be a string");
  }
  return it->get<std::string>();
}

Directive DirectiveFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "directive must be an object");
  Directive d;
  d.id = RequireString(j, "id");
  d.entry_point = RequireString(j, "entry_point");
  d.text = NormalizeNewlines(RequireString(j, "text"));
  if (auto it = j.find("context_sources"); it != j.end()) {
    if (!it->is_array()) {
      throw Error(ErrorCode::kParseError, "context_sources must be an array");
    }
    for (const auto& p : *it) {
      if (!p.is_string()) {
        throw Error(ErrorCode::kParseError, "context_sources entries must be strings");
      }
      d.context_sources.push_back(p.get<std::string>());
    }
  }
  if (auto it = j.find("policy"); it != j.end()) d.policy = PolicyFromJson(*it);
  d.version = 1;
  try {
    ValidateDirective(d);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, e.detail());
  }
  return d;
}

}  // namespace

std::string_view ToString(GenerationMode mode) {
  return mode == GenerationMode::kDeterministic ? "deterministic" : "diverse";
}
std::string_view ToString(CacheMode mode) {
  return mode == CacheMode::kCached ? "cached" : "ephemeral";
}
std::string_view ToString(ImportPolicy policy) {
  switch (policy) {
    case ImportPolicy::kDeny: return "deny";
    case ImportPolicy::kStrip: return "strip";
    case ImportPolicy::kAllow: return "allow";
  }
  return "?";
}

std::string NormalizeNewlines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    out.push_back(text[i]);
  }
  return out;
}

bool IsIdentifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!alpha(s.front())) return false;
  for (char c : s) {
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  }
  return true;
}

void ValidateDirective(const Directive& d) {
  if (d.id.empty()) throw Error(ErrorCode::kInvalidArgument, "directive id is empty");
  if (!IsIdentifier(d.entry_point)) {
    throw Error(ErrorCode::kInvalidArgument,
                "entry_point \"" + d.entry_point + "\" is not an identifier");
  }
  if (IsBlank(d.text)) {
    throw Error(ErrorCode::kInvalidArgument, "directive \"" + d.id + "\" has empty text");
  }
  const auto& p = d.policy;
  if (p.temperature < 0.0 || p.temperature > 2.0) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be in [0, 2]");
  }
  if (p.mode == GenerationMode::kDeterministic && p.temperature != 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "deterministic mode requires temperature 0");
  }
  if (p.timeout_ms <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "timeout_ms must be positive");
  }
}

json ToJson(const GenerationPolicy& policy) {
  return {{"mode", ToString(policy.mode)},
          {"temperature", policy.temperature},
          {"cache", ToString(policy.cache)},
          {"timeout_ms", policy.timeout_ms},
          {"import_policy", ToString(policy.import_policy)},
          {"allowlist", policy.allowlist}};
}

json ToJson(const Directive& d) {
  return {{"id", d.id},
          {"entry_point", d.entry_point},
          {"text", d.text},
          {"context_sources", d.context_sources},
          {"policy", ToJson(d.policy)},
          {"version", d.version}};
}

GenerationPolicy PolicyFromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "policy must be an object");
  GenerationPolicy p;
  if (auto it = j.find("mode"); it != j.end()) p.mode = ParseEnum(*it, "mode", kModes);
  if (auto it = j.find("temperature"); it != j.end()) {
    if (!it->is_number()) throw Error(ErrorCode::kParseError, "temperature must be a number");
    p.temperature = it->get<double>();
  }
  if (auto it = j.find("cache"); it != j.end()) p.cache = ParseEnum(*it, "cache", kCacheModes);
  if (auto it = j.find("timeout_ms"); it != j.end()) {
    if (!it->is_number_integer()) {
      throw Error(ErrorCode::kParseError, "timeout_ms must be an integer");
    }
    p.timeout_ms = it->get<int>();
  }
  if (auto it = j.find("import_policy"); it != j.end()) {
    p.import_policy = ParseEnum(*it, "import_policy", kImportPolicies);
  }
  if (auto it = j.find("allowlist"); it != j.end()) {
    if (!it->is_array()) throw Error(ErrorCode::kParseError, "allowlist must be an array");
    for (const auto& m : *it) {
      if (!m.is_string()) throw Error(ErrorCode::kParseError, "allowlist entries must be strings");
      p.allowlist.push_back(m.get<std::string>());
    }
  }
  return p;
}

std::filesystem::path DirectiveSet::Resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

DirectiveSet ParseDirectives(std::string_view text,
                             const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what(), LineOfOffset(text, e.byte));
  }
  if (!doc.is_object() || !doc.contains("directives") || !doc["directives"].is_array()) {
    throw Error(ErrorCode::kParseError, "expected {\"directives\": [...]}", 1);
  }
  const std::vector<int> lines = DirectiveStartLines(text);
  DirectiveSet set;
  set.base_dir = base_dir;
  if (auto it = doc.find("host"); it != doc.end() && !it->is_null()) {
    if (!it->is_string()) throw Error(ErrorCode::kParseError, "host must be a string", 1);
    set.host = it->get<std::string>();
  }
  const auto& arr = doc["directives"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    int line = i < lines.size() ? lines[i] : 0;
    Directive d;
    try {
      d = DirectiveFromJson(arr[i]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, e.detail(), line);
    }
    for (const auto& existing : set.directives) {
      if (existing.id == d.id) throw Error(ErrorCode::kDuplicateId, d.id);
    }
    set.directives.push_back(std::move(d));
  }
  return set;
}

DirectiveSet LoadDirectives(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseDirectives(ss.str(), path.parent_path());
}

std::string SerializeDirectives(const DirectiveSet& set) {
  json arr = json::array();
  for (const auto& d : set.directives) {
    json j = ToJson(d);
    j.erase("version");
    arr.push_back(std::move(j));
  }
  json doc = {{"directives", std::move(arr)}};
  if (set.host) doc["host"] = *set.host;
  return doc.dump(2) + "\n";
}

void WriteDirectives(const DirectiveSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << SerializeDirectives(set);
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

DirectiveStore::DirectiveStore(DirectiveSet set)
    : directives_(std::move(set.directives)),
      host_(std::move(set.host)),
      base_dir_(std::move(set.base_dir)) {
  for (std::size_t i = 0; i < directives_.size(); ++i) {
    if (!index_.emplace(directives_[i].id, i).second) {
      throw Error(ErrorCode::kDuplicateId, directives_[i].id);
    }
  }
}

Directive DirectiveStore::Get(std::string_view id) const {
  std::shared_lock lock(mu_);
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw Error(ErrorCode::kUnknownDirective, std::string(id));
  return directives_[it->second];
}

bool DirectiveStore::Contains(std::string_view id) const {
  std::shared_lock lock(mu_);
  return index_.count(std::string(id)) > 0;
}

std::vector<Directive> DirectiveStore::List() const {
  std::shared_lock lock(mu_);
  return directives_;
}

Directive DirectiveStore::UpdateText(std::string_view id, std::string_view new_text) {
  std::string text = NormalizeNewlines(new_text);
  std::unique_lock lock(mu_);
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw Error(ErrorCode::kUnknownDirective, std::string(id));
  if (IsBlank(text)) throw Error(ErrorCode::kEmptyText, std::string(id));
  Directive& d = directives_[it->second];
  d.text = std::move(text);
  ++d.version;
  return d;
}

void DirectiveStore::Add(Directive directive) {
  ValidateDirective(directive);
  directive.version = 1;
  std::unique_lock lock(mu_);
  if (index_.count(directive.id)) throw Error(ErrorCode::kDuplicateId, directive.id);
  index_.emplace(directive.id, directives_.size());
  directives_.push_back(std::move(directive));
}

DirectiveSet DirectiveStore::Snapshot() const {
  std::shared_lock lock(mu_);
  return {directives_, host_, base_dir_};
}

std::filesystem::path DirectiveStore::Resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir_.empty()) return p;
  return base_dir_ / p;
}

std::optional<std::filesystem::path> DirectiveStore::HostPrelude() const {
  std::shared_lock lock(mu_);
  if (!host_) return std::nullopt;
  return Resolve(*host_);
}

}  // namespace dco
