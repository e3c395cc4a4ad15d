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

#ifndef DCO_ERROR_H_
#define DCO_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dco {

// Errors that abort an operation. Generation and invocation failures are not
// errors; they are carried as FailureRecord values so they can be counted.
enum class ErrorCode {
  kFileNotFound,
  kParseError,
  kDuplicateId,
  kUnknownDirective,
  kEmptyText,
  kInvalidArgument,
  kMissingPlaceholder,
  kNetworkError,
  kMissingFixture,
  kAuthError,
  kBackendTimeout,
  kIoError,
  kBindError,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail, int line = 0);

  ErrorCode code() const { return code_; }
  const std::string& detail() const { return detail_; }
  // Input line for kParseError, 0 otherwise.
  int line() const { return line_; }

 private:
  ErrorCode code_;
  std::string detail_;
  int line_;
};

}  // namespace dco

#endif  // DCO_ERROR_H_
