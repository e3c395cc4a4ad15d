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

#include "dco/failure.h"

#include "dco/error.h"

namespace dco {

std::string_view ToString(FailureCategory category) {
  switch (category) {
    case FailureCategory::kExtractionFailure: return "ExtractionFailure";
    case FailureCategory::kCompileError: return "CompileError";
    case FailureCategory::kMissingEntryPoint: return "MissingEntryPoint";
    case FailureCategory::kDisallowedImport: return "DisallowedImport";
    case FailureCategory::kTimeout: return "Timeout";
    case FailureCategory::kRuntimeError: return "RuntimeError";
    case FailureCategory::kTestFailure: return "TestFailure";
    case FailureCategory::kBackendError: return "BackendError";
  }
  return "?";
}

std::string_view ToString(Stage stage) {
  switch (stage) {
    case Stage::kGenerate: return "generate";
    case Stage::kExtract: return "extract";
    case Stage::kGuard: return "guard";
    case Stage::kCompile: return "compile";
    case Stage::kRegister: return "register";
    case Stage::kInvoke: return "invoke";
    case Stage::kTest: return "test";
  }
  return "?";
}

std::optional<FailureCategory> ParseFailureCategory(std::string_view name) {
  for (FailureCategory c : kAllFailureCategories) {
    if (ToString(c) == name) return c;
  }
  return std::nullopt;
}

std::optional<Stage> ParseStage(std::string_view name) {
  for (Stage s : {Stage::kGenerate, Stage::kExtract, Stage::kGuard,
                  Stage::kCompile, Stage::kRegister, Stage::kInvoke,
                  Stage::kTest}) {
    if (ToString(s) == name) return s;
  }
  return std::nullopt;
}

bool IsConsistent(FailureCategory category, Stage stage) {
  switch (category) {
    case FailureCategory::kBackendError: return stage == Stage::kGenerate;
    case FailureCategory::kExtractionFailure: return stage == Stage::kExtract;
    case FailureCategory::kDisallowedImport: return stage == Stage::kGuard;
    case FailureCategory::kCompileError: return stage == Stage::kCompile;
    case FailureCategory::kMissingEntryPoint:
      return stage == Stage::kRegister || stage == Stage::kInvoke;
    case FailureCategory::kTimeout:
    case FailureCategory::kRuntimeError:
      return stage == Stage::kRegister || stage == Stage::kInvoke ||
             stage == Stage::kTest;
    case FailureCategory::kTestFailure: return stage == Stage::kTest;
  }
  return false;
}

nlohmann::json ToJson(const FailureRecord& failure) {
  return {{"category", ToString(failure.category)},
          {"detail", failure.detail},
          {"stage", ToString(failure.stage)}};
}

FailureRecord FailureFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParseError, "failure must be an object");
  auto category = ParseFailureCategory(j.value("category", ""));
  auto stage = ParseStage(j.value("stage", ""));
  if (!category || !stage) {
    throw Error(ErrorCode::kParseError, "bad failure category or stage");
  }
  return {*category, j.value("detail", ""), *stage};
}

}  // namespace dco
