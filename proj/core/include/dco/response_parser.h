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

#ifndef DCO_RESPONSE_PARSER_H_
#define DCO_RESPONSE_PARSER_H_

#include <optional>
#include <string>
#include <string_view>

#include "dco/failure.h"
#include "dco/prompt_builder.h"

namespace dco {

// Exactly one of `source` / `failure` is set. A present source is LF
// normalized and never blank.
struct ExtractionResult {
  std::optional<std::string> source;
  std::optional<FailureRecord> failure;

  bool ok() const { return source.has_value(); }
};

// Pulls candidate source out of a raw model reply.
//
// Strategies: the first complete, non-empty block between lines that start
// with three back ticks (an info word after the opening fence is dropped);
// a JSON object with a string field "code"; or, failing both, the whole
// reply when its first non-blank line starts with `def` / `async def`.
//
// The json_envelope contract tries the envelope first. Whenever the reply
// contains a fence line, the fence decides: an unterminated or empty fence is
// an extraction failure, not a fall-through to bare source.
//
// Never throws; unextractable replies come back as ExtractionFailure.
ExtractionResult ExtractCode(std::string_view reply, ResponseContract contract);

bool StartsWithDefinitionKeyword(std::string_view line);

}  // namespace dco

#endif  // DCO_RESPONSE_PARSER_H_
