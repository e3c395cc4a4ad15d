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

#include "dco/prompt_builder.h"

#include <fstream>
#include <sstream>

#include "dco/error.h"

namespace dco {

std::string_view ToString(ResponseContract contract) {
  return contract == ResponseContract::kFenced ? "fenced" : "json_envelope";
}

std::optional<ResponseContract> ParseResponseContract(std::string_view name) {
  if (name == "fenced") return ResponseContract::kFenced;
  if (name == "json_envelope") return ResponseContract::kJsonEnvelope;
  return std::nullopt;
}

nlohmann::json ToJson(const PromptBundle& bundle) {
  return {{"system_text", bundle.system_text},
          {"user_text", bundle.user_text},
          {"model_id", bundle.model_id},
          {"temperature", bundle.temperature},
          {"response_contract", ToString(bundle.response_contract)}};
}

std::string BuildSystemPrompt(std::span<const std::string> context_sources,
                              std::string_view template_text,
                              const std::filesystem::path& base_dir) {
  const auto pos = template_text.find(kContextPlaceholder);
  if (pos == std::string_view::npos) {
    throw Error(ErrorCode::kMissingPlaceholder, "template lacks {CONTEXT}");
  }
  std::string context;
  for (const auto& source : context_sources) {
    std::filesystem::path p(source);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorCode::kFileNotFound, source);
    std::stringstream ss;
    ss << in.rdbuf();
    context += "### FILE: " + source + "\n";
    context += NormalizeNewlines(ss.str());
    if (!context.empty() && context.back() != '\n') context.push_back('\n');
  }
  std::string out;
  out.reserve(template_text.size() + context.size());
  out.append(template_text.substr(0, pos));
  out.append(context);
  out.append(template_text.substr(pos + kContextPlaceholder.size()));
  return out;
}

PromptBundle BuildRequest(const Directive& directive, std::string_view system_text,
                          const PromptConfig& config) {
  PromptBundle bundle;
  bundle.system_text = std::string(system_text);
  bundle.model_id = config.model_id;
  bundle.temperature = directive.policy.EffectiveTemperature();
  bundle.response_contract = config.contract;
  bundle.user_text = directive.text;
  bundle.user_text += "\n\n";
  bundle.user_text += config.contract == ResponseContract::kFenced
                          ? kFencedInstruction
                          : kEnvelopeInstruction;
  return bundle;
}

}  // namespace dco
