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

#include "dco/llm_client.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "dco/error.h"
#include "dco/hash.h"

namespace dco {
namespace {

using nlohmann::json;

std::mutex& FixtureWriteMutex() {
  static std::mutex mu;
  return mu;
}

std::string EnvOr(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

std::string_view ToString(BackendKind kind) {
  switch (kind) {
    case BackendKind::kHttp: return "http";
    case BackendKind::kReplay: return "replay";
    case BackendKind::kMock: return "mock";
  }
  return "?";
}

std::optional<BackendKind> ParseBackendKind(std::string_view name) {
  if (name == "http") return BackendKind::kHttp;
  if (name == "replay") return BackendKind::kReplay;
  if (name == "mock") return BackendKind::kMock;
  return std::nullopt;
}

std::string CanonicalSerialization(const PromptBundle& bundle,
                                   std::optional<int> sample_index) {
  char temperature[64];
  std::snprintf(temperature, sizeof(temperature), "%.6f", bundle.temperature);
  std::string out;
  out.reserve(bundle.system_text.size() + bundle.user_text.size() + 64);
  out += bundle.model_id;
  out += '\n';
  out += temperature;
  out += '\n';
  out += bundle.system_text;
  out += '\n';
  out += bundle.user_text;
  if (sample_index) {
    out += '\n';
    out += std::to_string(*sample_index);
  }
  return out;
}

CompletionRequest MakeRequest(PromptBundle bundle, std::string directive_id,
                              std::int64_t directive_version,
                              std::optional<int> sample_index) {
  CompletionRequest request;
  request.request_key = Sha256Hex(CanonicalSerialization(bundle, sample_index));
  request.bundle = std::move(bundle);
  request.directive_id = std::move(directive_id);
  request.directive_version = directive_version;
  request.sample_index = sample_index;
  return request;
}

void RecordFixture(const CompletionRequest& request,
                   const CompletionResponse& response,
                   const std::filesystem::path& fixture_path) {
  json line = {{"key", request.request_key}, {"response", response.text}};
  std::lock_guard lock(FixtureWriteMutex());
  std::ofstream out(fixture_path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + fixture_path.string());
  out << line.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + fixture_path.string());
}

std::unordered_map<std::string, std::string> LoadFixtures(
    const std::filesystem::path& fixture_path) {
  std::ifstream in(fixture_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, fixture_path.string());
  std::unordered_map<std::string, std::string> fixtures;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kParseError, e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("key") || !j["key"].is_string() ||
        !j.contains("response") || !j["response"].is_string()) {
      throw Error(ErrorCode::kParseError, "expected {\"key\", \"response\"}", line_no);
    }
    fixtures[j["key"].get<std::string>()] = j["response"].get<std::string>();
  }
  return fixtures;
}

CompletionResponse CompletionBackend::Complete(const CompletionRequest& request) {
  calls_.fetch_add(1);
  const auto start = std::chrono::steady_clock::now();
  CompletionResponse response;
  response.text = DoComplete(request);
  response.backend = kind();
  response.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  if (record_path_) RecordFixture(request, response, *record_path_);
  return response;
}

void CompletionBackend::RecordTo(std::filesystem::path fixture_path) {
  record_path_ = std::move(fixture_path);
}

ReplayBackend::ReplayBackend(std::filesystem::path fixture_path)
    : path_(std::move(fixture_path)), fixtures_(LoadFixtures(path_)) {}

std::size_t ReplayBackend::size() const {
  std::lock_guard lock(mu_);
  return fixtures_.size();
}

std::string ReplayBackend::DoComplete(const CompletionRequest& request) {
  std::lock_guard lock(mu_);
  auto it = fixtures_.find(request.request_key);
  if (it == fixtures_.end()) {
    // The file may have grown since construction (record, then replay).
    fixtures_ = LoadFixtures(path_);
    it = fixtures_.find(request.request_key);
    if (it == fixtures_.end()) {
      throw Error(ErrorCode::kMissingFixture, request.request_key);
    }
  }
  return it->second;
}

std::unique_ptr<MockBackend> MockBackend::FromJson(const json& script) {
  if (!script.is_object()) throw Error(ErrorCode::kParseError, "mock script must be an object");
  auto mock = std::make_unique<MockBackend>();
  auto as_string = [](const json& j, const std::string& what) {
    if (!j.is_string()) throw Error(ErrorCode::kParseError, what + " must be a string");
    return j.get<std::string>();
  };
  if (auto it = script.find("default"); it != script.end()) {
    mock->SetDefault(as_string(*it, "default"));
  }
  if (auto it = script.find("directives"); it != script.end()) {
    if (!it->is_object()) throw Error(ErrorCode::kParseError, "directives must be an object");
    for (const auto& [id, entry] : it->items()) {
      if (entry.is_string()) {
        mock->SetReply(id, entry.get<std::string>());
        continue;
      }
      if (!entry.is_object()) {
        throw Error(ErrorCode::kParseError, "entry for " + id + " must be a string or object");
      }
      if (auto d = entry.find("default"); d != entry.end()) {
        mock->SetReply(id, as_string(*d, id + ".default"));
      }
      if (auto v = entry.find("versions"); v != entry.end()) {
        for (const auto& [version, reply] : v->items()) {
          mock->SetVersionReply(id, std::stoll(version), as_string(reply, id + ".versions"));
        }
      }
      if (auto s = entry.find("samples"); s != entry.end()) {
        for (const auto& [sample, reply] : s->items()) {
          mock->SetSampleReply(id, std::stoi(sample), as_string(reply, id + ".samples"));
        }
      }
      if (auto r = entry.find("rules"); r != entry.end()) {
        if (!r->is_array()) throw Error(ErrorCode::kParseError, id + ".rules must be an array");
        for (const auto& rule : *r) {
          if (!rule.is_object() || !rule.contains("text_contains") || !rule.contains("reply")) {
            throw Error(ErrorCode::kParseError,
                        id + ".rules entries need text_contains and reply");
          }
          mock->AddTextRule(id, as_string(rule["text_contains"], id + ".rules.text_contains"),
                            as_string(rule["reply"], id + ".rules.reply"));
        }
      }
    }
  }
  return mock;
}

std::unique_ptr<MockBackend> MockBackend::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  json script;
  try {
    script = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
  return FromJson(script);
}

void MockBackend::SetDefault(std::string reply) {
  std::lock_guard lock(mu_);
  default_ = std::move(reply);
}

void MockBackend::SetReply(const std::string& directive_id, std::string reply) {
  std::lock_guard lock(mu_);
  entries_[directive_id].reply = std::move(reply);
}

void MockBackend::SetVersionReply(const std::string& directive_id,
                                  std::int64_t version, std::string reply) {
  std::lock_guard lock(mu_);
  entries_[directive_id].by_version[version] = std::move(reply);
}

void MockBackend::SetSampleReply(const std::string& directive_id, int sample_index,
                                 std::string reply) {
  std::lock_guard lock(mu_);
  entries_[directive_id].by_sample[sample_index] = std::move(reply);
}

void MockBackend::AddTextRule(const std::string& directive_id, std::string needle,
                              std::string reply) {
  std::lock_guard lock(mu_);
  entries_[directive_id].rules.emplace_back(std::move(needle), std::move(reply));
}

std::string MockBackend::DoComplete(const CompletionRequest& request) {
  std::lock_guard lock(mu_);
  if (auto it = entries_.find(request.directive_id); it != entries_.end()) {
    const Entry& e = it->second;
    if (request.sample_index) {
      if (auto s = e.by_sample.find(*request.sample_index); s != e.by_sample.end()) {
        return s->second;
      }
    }
    if (auto v = e.by_version.find(request.directive_version); v != e.by_version.end()) {
      return v->second;
    }
    for (const auto& [needle, reply] : e.rules) {
      if (request.bundle.user_text.find(needle) != std::string::npos) return reply;
    }
    if (e.reply) return *e.reply;
  }
  if (default_) return *default_;
  throw Error(ErrorCode::kMissingFixture,
              "no scripted reply for directive \"" + request.directive_id + "\"");
}

HttpBackendOptions HttpBackendOptions::FromEnv() {
  HttpBackendOptions options;
  options.endpoint = EnvOr("DCO_ENDPOINT", "https://api.openai.com/v1");
  options.api_key = EnvOr("DCO_API_KEY", "");
  return options;
}

std::string ModelIdFromEnv() { return EnvOr("DCO_MODEL", std::string(kDefaultModelId)); }

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  std::string endpoint = options_.endpoint;
  while (!endpoint.empty() && endpoint.back() == '/') endpoint.pop_back();
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint needs a scheme: " + endpoint);
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  scheme_host_port_ = endpoint.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : endpoint.substr(path_start);
}

nlohmann::ordered_json HttpBackend::RequestBody(const PromptBundle& bundle) {
  nlohmann::ordered_json body;
  body["model"] = bundle.model_id;
  body["temperature"] = bundle.temperature;
  body["messages"] = nlohmann::ordered_json::array(
      {{{"role", "system"}, {"content", bundle.system_text}},
       {{"role", "user"}, {"content", bundle.user_text}}});
  return body;
}

std::string HttpBackend::AttemptOnce(const CompletionRequest& request) {
  if (options_.api_key.empty()) throw Error(ErrorCode::kAuthError, "DCO_API_KEY is not set");
  httplib::Client client(scheme_host_port_);
  const auto timeout = std::chrono::milliseconds(options_.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_bearer_token_auth(options_.api_key);

  const auto start = std::chrono::steady_clock::now();
  auto result = client.Post(path_prefix_ + "/chat/completions",
                            RequestBody(request.bundle).dump(), "application/json");
  if (!result) {
    const auto err = result.error();
    const bool timed_out =
        err == httplib::Error::ConnectionTimeout ||
        ((err == httplib::Error::Read || err == httplib::Error::Write) &&
         std::chrono::steady_clock::now() - start >= timeout);
    if (timed_out) throw Error(ErrorCode::kBackendTimeout, httplib::to_string(err));
    throw Error(ErrorCode::kNetworkError, httplib::to_string(err));
  }
  if (result->status == 401 || result->status == 403) {
    throw Error(ErrorCode::kAuthError, "HTTP " + std::to_string(result->status));
  }
  if (result->status < 200 || result->status >= 300) {
    throw Error(ErrorCode::kNetworkError, "HTTP " + std::to_string(result->status));
  }
  try {
    json reply = json::parse(result->body);
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kNetworkError, std::string("malformed reply: ") + e.what());
  }
}

std::string HttpBackend::DoComplete(const CompletionRequest& request) {
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      return AttemptOnce(request);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNetworkError || attempt >= options_.retry_backoff.size()) {
        throw;
      }
      std::this_thread::sleep_for(options_.retry_backoff[attempt]);
    }
  }
}

}  // namespace dco
