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

#include "dco/error.h"

namespace dco {
namespace {

std::string Describe(ErrorCode code, const std::string& detail, int line) {
  std::string out(ErrorCodeName(code));
  if (line > 0) out += "(line " + std::to_string(line) + ")";
  if (!detail.empty()) out += ": " + detail;
  return out;
}

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "FileNotFound";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kUnknownDirective: return "UnknownDirective";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMissingPlaceholder: return "MissingPlaceholder";
    case ErrorCode::kNetworkError: return "NetworkError";
    case ErrorCode::kMissingFixture: return "MissingFixture";
    case ErrorCode::kAuthError: return "AuthError";
    case ErrorCode::kBackendTimeout: return "BackendTimeout";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kBindError: return "BindError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string detail, int line)
    : std::runtime_error(Describe(code, detail, line)),
      code_(code),
      detail_(std::move(detail)),
      line_(line) {}

}  // namespace dco
