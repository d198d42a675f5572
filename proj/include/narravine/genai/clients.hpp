#pragma once

#include <optional>
#include <string>
#include <vector>

#include "narravine/common/clock.hpp"
#include "narravine/common/story.hpp"
#include "narravine/genai/prompts.hpp"
#include "narravine/genai/transport.hpp"

namespace narravine::genai {

class ContextViolation : public Error {
 public:
  using Error::Error;
};

class IncompleteTranscript : public Error {
 public:
  using Error::Error;
};

struct CubeRef {
  std::string id;
  std::optional<std::string> image_path;
};

// Collected per call: attempts made and any constraint violations that
// survived the retry budget.
struct Diagnostics {
  int attempts = 0;
  std::vector<Json> warnings;
};

StickerDescription describe_sticker(const CubeRef& cube, const PromptConfig& cfg, Transport& transport,
                                    Diagnostics* diag = nullptr, const Clock* clock = nullptr);

StorySnippet generate_snippet(const StoryTranscript& context, SnippetStep step,
                              const StickerDescription& description, const PromptConfig& cfg,
                              Transport& transport, int trial_index = 1,
                              Diagnostics* diag = nullptr);

// cube_terms: one term per cube (head nouns) the recap should mention.
StorySnippet generate_recap(const StoryTranscript& transcript, const std::vector<std::string>& cube_terms,
                            const PromptConfig& cfg, Transport& transport, int trial_index = 1,
                            Diagnostics* diag = nullptr);

const std::vector<std::string>& forbidden_narration_words();

}  // namespace narravine::genai
