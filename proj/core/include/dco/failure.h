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

#ifndef DCO_FAILURE_H_
#define DCO_FAILURE_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace dco {

enum class FailureCategory {
  kExtractionFailure,
  kCompileError,
  kMissingEntryPoint,
  kDisallowedImport,
  kTimeout,
  kRuntimeError,
  kTestFailure,
  kBackendError,
};

inline constexpr std::array<FailureCategory, 8> kAllFailureCategories = {
    FailureCategory::kExtractionFailure, FailureCategory::kCompileError,
    FailureCategory::kMissingEntryPoint, FailureCategory::kDisallowedImport,
    FailureCategory::kTimeout,           FailureCategory::kRuntimeError,
    FailureCategory::kTestFailure,       FailureCategory::kBackendError,
};

// Pipeline stage at which a failure was detected, in pipeline order.
enum class Stage { kGenerate, kExtract, kGuard, kCompile, kRegister, kInvoke, kTest };

std::string_view ToString(FailureCategory category);
std::string_view ToString(Stage stage);
std::optional<FailureCategory> ParseFailureCategory(std::string_view name);
std::optional<Stage> ParseStage(std::string_view name);

// Whether `category` may be reported at `stage`. ExtractionFailure only at
// extract, TestFailure only at test, and so on.
bool IsConsistent(FailureCategory category, Stage stage);

struct FailureRecord {
  FailureCategory category;
  std::string detail;
  Stage stage;

  friend bool operator==(const FailureRecord&, const FailureRecord&) = default;
};

nlohmann::json ToJson(const FailureRecord& failure);
// Throws Error(kParseError) on malformed input.
FailureRecord FailureFromJson(const nlohmann::json& j);

}  // namespace dco

#endif  // DCO_FAILURE_H_
