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

#ifndef DCO_BLOCK_STORE_H_
#define DCO_BLOCK_STORE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dco/failure.h"
#include "dco/time_util.h"

namespace dco {

enum class BlockStatus { kReady, kFailed };

// One generation attempt. status == kReady exactly when failure is empty and
// the source was registered.
struct GeneratedBlock {
  std::string directive_id;
  std::int64_t directive_version = 0;
  std::string cache_key;
  std::string raw_response;
  std::string source;
  std::string source_hash;  // Empty when nothing was extracted.
  BlockStatus status = BlockStatus::kFailed;
  std::optional<FailureRecord> failure;
  TimestampMs created_at = 0;

  bool ready() const { return status == BlockStatus::kReady; }
};

nlohmann::json ToJson(const GeneratedBlock& block);
// Throws Error(kParseError).
GeneratedBlock BlockFromJson(const nlohmann::json& j);

struct PurgeScope {
  enum class Kind { kAll, kFailedOnly, kOlderThan };
  Kind kind = Kind::kAll;
  std::int64_t older_than_ms = 0;

  static PurgeScope All() { return {Kind::kAll, 0}; }
  static PurgeScope FailedOnly() { return {Kind::kFailedOnly, 0}; }
  static PurgeScope OlderThan(std::int64_t ms) { return {Kind::kOlderThan, ms}; }

  // older_than(ms) matches records created at or before now - ms.
  bool Matches(const GeneratedBlock& block, TimestampMs now) const;
};

// Accepts "all", "failed_only" or {"older_than_ms": N}. Throws Error(kParseError).
PurgeScope PurgeScopeFromJson(const nlohmann::json& j);

// Append-only JSONL file of GeneratedBlock records, one per line. An empty
// path keeps the records in memory only.
class BlockStore {
 public:
  explicit BlockStore(std::filesystem::path path = {});

  BlockStore(const BlockStore&) = delete;
  BlockStore& operator=(const BlockStore&) = delete;

  // Throws Error(kIoError).
  void Append(const GeneratedBlock& block);
  // Records in append order. A missing file is an empty store.
  std::vector<GeneratedBlock> LoadAll() const;
  std::vector<GeneratedBlock> ForDirective(const std::string& directive_id) const;
  // Deletes matching records; returns how many. Throws Error(kIoError).
  std::size_t Purge(const PurgeScope& scope, TimestampMs now);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::vector<GeneratedBlock> LoadLocked() const;

  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::vector<GeneratedBlock> memory_;
};

}  // namespace dco

#endif  // DCO_BLOCK_STORE_H_
