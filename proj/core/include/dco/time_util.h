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

#ifndef DCO_TIME_UTIL_H_
#define DCO_TIME_UTIL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dco {

// Milliseconds since the Unix epoch, UTC.
using TimestampMs = std::int64_t;

TimestampMs NowMs();

// "2026-10-19T13:24:00.123Z"
std::string FormatIso8601(TimestampMs ts);
std::optional<TimestampMs> ParseIso8601(std::string_view text);

}  // namespace dco

#endif  // DCO_TIME_UTIL_H_
