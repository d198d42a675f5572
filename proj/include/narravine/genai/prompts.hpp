#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "narravine/common/json.hpp"

namespace narravine::genai {

// Deployed system prompts, byte-for-byte, typos included.
extern const std::string_view kDescriberPrompt;
extern const std::string_view kNarratorPrompt;
extern const std::string_view kDescriberPromptSha256;
extern const std::string_view kNarratorPromptSha256;

inline constexpr int kMaxDescriptionWords = 10;
inline constexpr int kMaxSnippetWords = 15;

enum class VlmInput { text, image };

NLOHMANN_JSON_SERIALIZE_ENUM(VlmInput, {{VlmInput::text, "text"}, {VlmInput::image, "image"}})

struct PromptConfig {
  std::string describer_system_prompt{kDescriberPrompt};
  std::string narrator_system_prompt{kNarratorPrompt};
  std::string model_name = "gpt-4o";
  double describer_temperature = 0.0;
  double narrator_temperature = 0.7;
  int max_retries = 1;
  std::int64_t deadline_ms = 30000;
  VlmInput vlm_input = VlmInput::text;
};

void to_json(Json& j, const PromptConfig& c);
void from_json(const Json& j, PromptConfig& c);

// {describer:{sha256, verbatim}, narrator:{...}} for the session log.
Json prompt_fidelity(const PromptConfig& c);
bool prompts_verbatim(const PromptConfig& c);

}  // namespace narravine::genai
