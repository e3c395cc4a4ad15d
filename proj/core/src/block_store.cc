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

#include "dco/block_store.h"

#include <fstream>

#include "dco/error.h"

namespace dco {

using nlohmann::json;

nlohmann::json ToJson(const GeneratedBlock& b) {
  return {{"directive_id", b.directive_id},
          {"directive_version", b.directive_version},
          {"cache_key", b.cache_key},
          {"raw_response", b.raw_response},
          {"source", b.source},
          {"source_hash", b.source_hash},
          {"status", b.ready() ? "ready" : "failed"},
          {"failure", b.failure ? ToJson(*b.failure) : json()},
          {"created_at", FormatIso8601(b.created_at)}};
}

GeneratedBlock BlockFromJson(const json& j) {
  try {
    GeneratedBlock b;
    b.directive_id = j.at("directive_id").get<std::string>();
    b.directive_version = j.at("directive_version").get<std::int64_t>();
    b.cache_key = j.at("cache_key").get<std::string>();
    b.raw_response = j.value("raw_response", "");
    b.source = j.at("source").get<std::string>();
    b.source_hash = j.at("source_hash").get<std::string>();
    const auto status = j.at("status").get<std::string>();
    if (status != "ready" && status != "failed") {
      throw Error(ErrorCode::kParseError, "bad block status " + status);
    }
    b.status = status == "ready" ? BlockStatus::kReady : BlockStatus::kFailed;
    if (j.contains("failure") && !j["failure"].is_null()) b.failure = FailureFromJson(j["failure"]);
    auto ts = ParseIso8601(j.at("created_at").get<std::string>());
    if (!ts) throw Error(ErrorCode::kParseError, "bad created_at");
    b.created_at = *ts;
    return b;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

bool PurgeScope::Matches(const GeneratedBlock& block, TimestampMs now) const {
  switch (kind) {
    case Kind::kAll: return true;
    case Kind::kFailedOnly: return !block.ready();
    case Kind::kOlderThan: return block.created_at <= now - older_than_ms;
  }
  return false;
}

PurgeScope PurgeScopeFromJson(const json& j) {
  if (j.is_string()) {
    if (j == "all") return PurgeScope::All();
    if (j == "failed_only") return PurgeScope::FailedOnly();
  } else if (j.is_object() && j.contains("older_than_ms") &&
             j["older_than_ms"].is_number_integer() && j["older_than_ms"].get<std::int64_t>() >= 0) {
    return PurgeScope::OlderThan(j["older_than_ms"].get<std::int64_t>());
  }
  throw Error(ErrorCode::kParseError,
              "scope must be \"all\", \"failed_only\" or {\"older_than_ms\": N}");
}

BlockStore::BlockStore(std::filesystem::path path) : path_(std::move(path)) {}

void BlockStore::Append(const GeneratedBlock& block) {
  std::lock_guard lock(mu_);
  if (path_.empty()) {
    memory_.push_back(block);
    return;
  }
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + path_.string());
  out << ToJson(block).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path_.string());
}

std::vector<GeneratedBlock> BlockStore::LoadLocked() const {
  if (path_.empty()) return memory_;
  std::vector<GeneratedBlock> blocks;
  std::ifstream in(path_, std::ios::binary);
  if (!in) return blocks;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::kParseError, path_.string(), line_no);
    try {
      blocks.push_back(BlockFromJson(j));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParseError, e.detail(), line_no);
    }
  }
  return blocks;
}

std::vector<GeneratedBlock> BlockStore::LoadAll() const {
  std::lock_guard lock(mu_);
  return LoadLocked();
}

std::vector<GeneratedBlock> BlockStore::ForDirective(const std::string& directive_id) const {
  std::vector<GeneratedBlock> out;
  for (auto& b : LoadAll()) {
    if (b.directive_id == directive_id) out.push_back(std::move(b));
  }
  return out;
}

std::size_t BlockStore::Purge(const PurgeScope& scope, TimestampMs now) {
  std::lock_guard lock(mu_);
  std::vector<GeneratedBlock> all = LoadLocked();
  std::vector<GeneratedBlock> kept;
  for (auto& b : all) {
    if (!scope.Matches(b, now)) kept.push_back(std::move(b));
  }
  const std::size_t purged = all.size() - kept.size();
  if (path_.empty()) {
    memory_ = std::move(kept);
    return purged;
  }
  if (purged == 0) return 0;
  const auto tmp = std::filesystem::path(path_.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    for (const auto& b : kept) out << ToJson(b).dump() << '\n';
    if (!out) throw Error(ErrorCode::kIoError, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec) throw Error(ErrorCode::kIoError, "rename failed: " + ec.message());
  return purged;
}

}  // namespace dco
