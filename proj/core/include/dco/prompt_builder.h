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

#ifndef DCO_PROMPT_BUILDER_H_
#define DCO_PROMPT_BUILDER_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dco/directive_store.h"

namespace dco {

enum class ResponseContract { kFenced, kJsonEnvelope };

std::string_view ToString(ResponseContract contract);
std::optional<ResponseContract> ParseResponseContract(std::string_view name);

inline constexpr std::string_view kContextPlaceholder = "{CONTEXT}";

// The editor prompt, followed by the inlined skeleton sources.
inline constexpr std::string_view kDefaultSystemTemplate =
    "You are a programmer. You should use the preexisting code in the file "
    "DynamicTextEditor.py and create the requested functions so the code "
    "operates without error. Pay attention to the imports in "
    "DynamicTextEditor and choose code that works within those imports.\n"
    "{CONTEXT}";

inline constexpr std::string_view kFencedInstruction =
    "Return only the function source inside one fenced code block delimited "
    "by three back ticks.";

// The envelope field name "code" is this project's choice.
inline constexpr std::string_view kEnvelopeInstruction =
    "Return only a JSON object of the form {\"code\": \"<function source>\"} "
    "and no other text.";

inline constexpr std::string_view kDefaultModelId = "gpt-3.5-turbo";

struct PromptConfig {
  std::string model_id{kDefaultModelId};
  ResponseContract contract = ResponseContract::kFenced;
};

struct PromptBundle {
  std::string system_text;
  std::string user_text;
  std::string model_id;
  double temperature = 0.0;
  ResponseContract response_contract = ResponseContract::kFenced;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

nlohmann::json ToJson(const PromptBundle& bundle);

// Replaces {CONTEXT} in `template_text` with every context file, each
// preceded by "### FILE: <path>" where <path> is the path as listed.
// Relative paths are read from `base_dir`.
// Throws Error(kFileNotFound) or Error(kMissingPlaceholder).
std::string BuildSystemPrompt(std::span<const std::string> context_sources,
                              std::string_view template_text,
                              const std::filesystem::path& base_dir = {});

PromptBundle BuildRequest(const Directive& directive, std::string_view system_text,
                          const PromptConfig& config);

}  // namespace dco

#endif  // DCO_PROMPT_BUILDER_H_
