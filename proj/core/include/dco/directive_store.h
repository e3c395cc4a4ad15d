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

#ifndef DCO_DIRECTIVE_STORE_H_
#define DCO_DIRECTIVE_STORE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace dco {

enum class GenerationMode { kDeterministic, kDiverse };
enum class CacheMode { kCached, kEphemeral };
enum class ImportPolicy { kDeny, kStrip, kAllow };

std::string_view ToString(GenerationMode mode);
std::string_view ToString(CacheMode mode);
std::string_view ToString(ImportPolicy policy);

struct GenerationPolicy {
  GenerationMode mode = GenerationMode::kDeterministic;
  // Only meaningful in diverse mode; always 0 in deterministic mode.
  double temperature = 0.0;
  CacheMode cache = CacheMode::kCached;
  int timeout_ms = 2000;
  ImportPolicy import_policy = ImportPolicy::kDeny;
  std::vector<std::string> allowlist;

  // Temperature actually sent to the backend.
  double EffectiveTemperature() const {
    return mode == GenerationMode::kDeterministic ? 0.0 : temperature;
  }

  friend bool operator==(const GenerationPolicy&, const GenerationPolicy&) = default;
};

struct Directive {
  std::string id;
  std::string entry_point;
  std::string text;
  // Paths as written in the directives file; relative paths resolve against
  // DirectiveSet::base_dir.
  std::vector<std::string> context_sources;
  GenerationPolicy policy;
  std::int64_t version = 1;
};

// [A-Za-z_][A-Za-z0-9_]*
bool IsIdentifier(std::string_view s);

// Throws Error(kInvalidArgument) when a Directive invariant does not hold.
void ValidateDirective(const Directive& d);

nlohmann::json ToJson(const GenerationPolicy& policy);
nlohmann::json ToJson(const Directive& directive);
// Missing policy fields take their defaults. Throws Error(kParseError).
GenerationPolicy PolicyFromJson(const nlohmann::json& j);

struct DirectiveSet {
  std::vector<Directive> directives;
  // Optional Python prelude that defines the host application namespace.
  std::optional<std::string> host;
  std::filesystem::path base_dir;

  std::filesystem::path Resolve(const std::string& path) const;
};

DirectiveSet ParseDirectives(std::string_view text,
                             const std::filesystem::path& base_dir = {});
DirectiveSet LoadDirectives(const std::filesystem::path& path);
std::string SerializeDirectives(const DirectiveSet& set);
void WriteDirectives(const DirectiveSet& set, const std::filesystem::path& path);

// Single source of truth for directives while the process runs. Reads are
// concurrent; updates are serialized and never observed half-applied.
class DirectiveStore {
 public:
  explicit DirectiveStore(DirectiveSet set);

  DirectiveStore(const DirectiveStore&) = delete;
  DirectiveStore& operator=(const DirectiveStore&) = delete;

  Directive Get(std::string_view id) const;
  bool Contains(std::string_view id) const;
  std::vector<Directive> List() const;

  // Replaces the text and bumps the version by one, even if the text is
  // unchanged. CRLF is normalized to LF.
  Directive UpdateText(std::string_view id, std::string_view new_text);

  // Adds a directive at version 1. Throws DuplicateId.
  void Add(Directive directive);

  DirectiveSet Snapshot() const;
  std::filesystem::path Resolve(const std::string& path) const;
  std::optional<std::filesystem::path> HostPrelude() const;

 private:
  mutable std::shared_mutex mu_;
  std::vector<Directive> directives_;
  std::unordered_map<std::string, std::size_t> index_;
  std::optional<std::string> host_;
  std::filesystem::path base_dir_;
};

std::string NormalizeNewlines(std::string_view text);

}  // namespace dco

#endif  // DCO_DIRECTIVE_STORE_H_
