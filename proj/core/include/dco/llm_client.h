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

#ifndef DCO_LLM_CLIENT_H_
#define DCO_LLM_CLIENT_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "dco/prompt_builder.h"

namespace dco {

enum class BackendKind { kHttp, kReplay, kMock };

std::string_view ToString(BackendKind kind);
std::optional<BackendKind> ParseBackendKind(std::string_view name);

// model_id "\n" temperature(%.6f) "\n" system_text "\n" user_text, plus
// "\n" <sample index> when sampling several completions of one prompt.
std::string CanonicalSerialization(const PromptBundle& bundle,
                                   std::optional<int> sample_index = std::nullopt);

struct CompletionRequest {
  PromptBundle bundle;
  std::string request_key;  // SHA-256 hex of the canonical serialization.

  // Routing hints for the mock backend. Not part of request_key.
  std::string directive_id;
  std::int64_t directive_version = 0;
  std::optional<int> sample_index;
};

CompletionRequest MakeRequest(PromptBundle bundle, std::string directive_id = {},
                              std::int64_t directive_version = 0,
                              std::optional<int> sample_index = std::nullopt);

struct CompletionResponse {
  std::string text;  // May be empty; that is a classifiable reply, not an error.
  std::int64_t latency_ms = 0;
  BackendKind backend = BackendKind::kMock;
};

// Appends {"key", "response"} to a JSONL fixture file. Appends from this
// process are serialized. Throws Error(kIoError).
void RecordFixture(const CompletionRequest& request,
                   const CompletionResponse& response,
                   const std::filesystem::path& fixture_path);

// Reads a fixture file into key -> response; later lines win.
// Throws Error(kFileNotFound) / Error(kParseError).
std::unordered_map<std::string, std::string> LoadFixtures(
    const std::filesystem::path& fixture_path);

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;

  // Thread-safe. Throws Error with kNetworkError, kMissingFixture, kAuthError
  // or kBackendTimeout.
  CompletionResponse Complete(const CompletionRequest& request);

  virtual BackendKind kind() const = 0;

  // Number of Complete() calls that reached the backend.
  std::int64_t call_count() const { return calls_.load(); }

  // Every successful reply is also appended to `fixture_path`.
  void RecordTo(std::filesystem::path fixture_path);

 protected:
  virtual std::string DoComplete(const CompletionRequest& request) = 0;

 private:
  std::atomic<std::int64_t> calls_{0};
  std::optional<std::filesystem::path> record_path_;
};

class ReplayBackend final : public CompletionBackend {
 public:
  explicit ReplayBackend(std::filesystem::path fixture_path);

  BackendKind kind() const override { return BackendKind::kReplay; }
  std::size_t size() const;

 protected:
  std::string DoComplete(const CompletionRequest& request) override;

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::string> fixtures_;
};

// Scripted replies, looked up by directive id. A directive entry may pin
// replies to a sample index or a directive version; the sample pin wins.
class MockBackend final : public CompletionBackend {
 public:
  MockBackend() = default;

  // {"default": "...", "directives": {"<id>": "<reply>" |
  //   {"default": "...", "versions": {"2": "..."}, "samples": {"0": "..."},
  //    "rules": [{"text_contains": "...", "reply": "..."}]}}}
  // Lookup order: sample, version, first matching rule, entry default,
  // script default.
  static std::unique_ptr<MockBackend> FromJson(const nlohmann::json& script);
  static std::unique_ptr<MockBackend> Load(const std::filesystem::path& path);

  void SetDefault(std::string reply);
  void SetReply(const std::string& directive_id, std::string reply);
  void SetVersionReply(const std::string& directive_id, std::int64_t version,
                       std::string reply);
  void SetSampleReply(const std::string& directive_id, int sample_index,
                      std::string reply);
  // Matches when the request's user text contains `needle`.
  void AddTextRule(const std::string& directive_id, std::string needle, std::string reply);

  BackendKind kind() const override { return BackendKind::kMock; }

 protected:
  std::string DoComplete(const CompletionRequest& request) override;

 private:
  struct Entry {
    std::optional<std::string> reply;
    std::map<std::int64_t, std::string> by_version;
    std::map<int, std::string> by_sample;
    std::vector<std::pair<std::string, std::string>> rules;
  };
  mutable std::mutex mu_;
  std::optional<std::string> default_;
  std::unordered_map<std::string, Entry> entries_;
};

struct HttpBackendOptions {
  std::string endpoint;  // e.g. "https://api.openai.com/v1"
  std::string api_key;
  int timeout_ms = 30000;
  // Delays before each retry; retries happen on NetworkError only.
  std::vector<std::chrono::milliseconds> retry_backoff = {
      std::chrono::milliseconds(1000), std::chrono::milliseconds(2000)};

  // DCO_ENDPOINT and DCO_API_KEY.
  static HttpBackendOptions FromEnv();
};

// Chat-completions wire format over HTTP(S).
class HttpBackend final : public CompletionBackend {
 public:
  explicit HttpBackend(HttpBackendOptions options);

  BackendKind kind() const override { return BackendKind::kHttp; }

  // The JSON body POSTed to {endpoint}/chat/completions.
  static nlohmann::ordered_json RequestBody(const PromptBundle& bundle);

 protected:
  std::string DoComplete(const CompletionRequest& request) override;

 private:
  std::string AttemptOnce(const CompletionRequest& request);

  HttpBackendOptions options_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

// DCO_MODEL, falling back to gpt-3.5-turbo.
std::string ModelIdFromEnv();

}  // namespace dco

#endif  // DCO_LLM_CLIENT_H_
