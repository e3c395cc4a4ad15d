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

#include "dco/response_parser.h"

#include <vector>

#include <nlohmann/json.hpp>

#include "dco/directive_store.h"

namespace dco {
namespace {

constexpr std::string_view kFence = "```";

bool IsBlank(std::string_view s) {
  return s.find_first_not_of(" \t\n\f\v\r") == std::string_view::npos;
}

std::vector<std::string_view> SplitLines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (true) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

bool IsFenceLine(std::string_view line) { return line.substr(0, kFence.size()) == kFence; }

enum class FenceState { kFound, kNoFence, kUnterminated, kOnlyEmpty };

struct FenceScan {
  FenceState state = FenceState::kNoFence;
  std::string body;
};

FenceScan ScanFences(std::string_view text) {
  const auto lines = SplitLines(text);
  FenceScan scan;
  std::size_t i = 0;
  while (i < lines.size()) {
    if (!IsFenceLine(lines[i])) {
      ++i;
      continue;
    }
    std::size_t close = i + 1;
    while (close < lines.size() && !IsFenceLine(lines[close])) ++close;
    if (close == lines.size()) {
      scan.state = FenceState::kUnterminated;
      return scan;
    }
    std::string body;
    for (std::size_t k = i + 1; k < close; ++k) {
      if (k > i + 1) body.push_back('\n');
      body.append(lines[k]);
    }
    if (!IsBlank(body)) {
      scan.state = FenceState::kFound;
      scan.body = std::move(body);
      return scan;
    }
    scan.state = FenceState::kOnlyEmpty;
    i = close + 1;
  }
  return scan;
}

std::optional<std::string> FromEnvelope(std::string_view text) {
  auto doc = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object()) return std::nullopt;
  auto it = doc.find("code");
  if (it == doc.end() || !it->is_string()) return std::nullopt;
  std::string code = NormalizeNewlines(it->get<std::string>());
  // Models sometimes fence the code inside the envelope too.
  FenceScan inner = ScanFences(code);
  if (inner.state == FenceState::kFound) code = std::move(inner.body);
  if (IsBlank(code)) return std::nullopt;
  return code;
}

ExtractionResult Success(std::string source) { return {std::move(source), std::nullopt}; }

ExtractionResult Failure(std::string detail) {
  return {std::nullopt,
          FailureRecord{FailureCategory::kExtractionFailure, std::move(detail), Stage::kExtract}};
}

}  // namespace

bool StartsWithDefinitionKeyword(std::string_view line) {
  auto first = line.find_first_not_of(" \t");
  if (first == std::string_view::npos) return false;
  line.remove_prefix(first);
  return line.substr(0, 4) == "def " || line.substr(0, 10) == "async def ";
}

ExtractionResult ExtractCode(std::string_view reply, ResponseContract contract) {
  const std::string text = NormalizeNewlines(reply);

  if (contract == ResponseContract::kJsonEnvelope) {
    if (auto code = FromEnvelope(text)) return Success(std::move(*code));
  }

  FenceScan scan = ScanFences(text);
  switch (scan.state) {
    case FenceState::kFound:
      if (contract == ResponseContract::kJsonEnvelope) {
        if (auto code = FromEnvelope(scan.body)) return Success(std::move(*code));
      }
      return Success(std::move(scan.body));
    case FenceState::kUnterminated:
      return Failure("unterminated fence");
    case FenceState::kOnlyEmpty:
      return Failure("empty fenced block");
    case FenceState::kNoFence:
      break;
  }

  if (contract == ResponseContract::kFenced) {
    if (auto code = FromEnvelope(text)) return Success(std::move(*code));
  }

  for (std::string_view line : SplitLines(text)) {
    if (IsBlank(line)) continue;
    if (StartsWithDefinitionKeyword(line)) return Success(text);
    break;
  }
  return Failure("no fence, no envelope, no definition keyword");
}

}  // namespace dco
