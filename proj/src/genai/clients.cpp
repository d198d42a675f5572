#include "narravine/genai/clients.hpp"

#include <algorithm>
#include <chrono>

#include <spdlog/spdlog.h>

#include "narravine/common/text.hpp"

namespace narravine::genai {

namespace {

const std::vector<std::string> kStickerWord{"sticker"};

std::string readable(std::string id) {
  std::replace(id.begin(), id.end(), '_', ' ');
  return id;
}

std::int64_t elapsed_since(const Clock* clock, std::int64_t start,
                           std::chrono::steady_clock::time_point wall_start) {
  if (clock) return clock->now_ms() - start;
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               wall_start)
      .count();
}

std::vector<ChatMessage> history(const StoryTranscript& t) {
  std::vector<ChatMessage> out;
  for (const auto& turn : t.turns) {
    if (turn.speaker == Speaker::robot) {
      out.push_back({"assistant", turn.text});
    } else {
      out.push_back({"user", "The child continues the story: " + turn.text});
    }
  }
  return out;
}

void warn(Diagnostics* diag, Json w) {
  spdlog::warn("genai: {}", w.dump());
  if (diag) diag->warnings.push_back(std::move(w));
}

// Shared retry loop: `check` returns the list of violated constraints.
template <typename Check>
std::pair<std::string, std::vector<std::string>> run_with_retries(const ChatRequest& req, int max_retries,
                                                                  Transport& transport, Diagnostics* diag,
                                                                  Check check) {
  std::optional<std::string> last_text;
  std::vector<std::string> last_violations;
  std::string last_error;
  const int attempts = 1 + std::max(0, max_retries);
  for (int a = 0; a < attempts; ++a) {
    if (diag) ++diag->attempts;
    try {
      auto text = text::trim(transport.complete(req).text);
      auto violations = check(text);
      if (violations.empty()) return {text, {}};
      last_text = std::move(text);
      last_violations = std::move(violations);
    } catch (const TransportFailure& e) {
      last_error = e.what();
    }
  }
  if (!last_text) throw TransportFailure(req.endpoint + ": " + last_error);
  return {*last_text, last_violations};
}

}  // namespace

const std::vector<std::string>& forbidden_narration_words() {
  static const std::vector<std::string> words{"cartoon", "cardbox", "sticker"};
  return words;
}

StickerDescription describe_sticker(const CubeRef& cube, const PromptConfig& cfg, Transport& transport,
                                    Diagnostics* diag, const Clock* clock) {
  ChatRequest req;
  req.endpoint = "describer";
  req.model = cfg.model_name;
  req.temperature = cfg.describer_temperature;
  req.system = cfg.describer_system_prompt;
  req.deadline_ms = cfg.deadline_ms;
  req.metadata = {{"cube", cube.id}};
  if (cfg.vlm_input == VlmInput::image && cube.image_path) {
    req.image_path = cube.image_path;
    req.messages.push_back({"user", "What is inside the sticker?"});
  } else {
    req.messages.push_back(
        {"user", "The camera shows a cube with a picture of " + readable(cube.id) + ". What is inside the sticker?"});
  }

  const std::int64_t start = clock ? clock->now_ms() : 0;
  const auto wall_start = std::chrono::steady_clock::now();
  auto [text, violations] = run_with_retries(req, cfg.max_retries, transport, diag, [](const std::string& t) {
    std::vector<std::string> v;
    if (t.empty() || text::count_words(t) == 0) v.push_back("empty");
    if (text::count_words(t) > kMaxDescriptionWords) v.push_back("too_long");
    if (text::contains_word(t, "sticker")) v.push_back("forbidden_word");
    return v;
  });
  if (!violations.empty()) {
    std::string fixed = text::truncate_words(text::remove_words(text, kStickerWord), kMaxDescriptionWords);
    if (text::count_words(fixed) == 0) fixed = "A " + readable(cube.id);
    warn(diag, {{"endpoint", "describer"}, {"violations", violations}, {"original", text}, {"fixed", fixed}});
    text = fixed;
  }
  return StickerDescription{text, text::count_words(text), cube.id, elapsed_since(clock, start, wall_start)};
}

StorySnippet generate_snippet(const StoryTranscript& context, SnippetStep step,
                              const StickerDescription& description, const PromptConfig& cfg,
                              Transport& transport, int trial_index, Diagnostics* diag) {
  const auto& turns = context.turns;
  if (step == SnippetStep::recap) throw ContextViolation("recaps go through generate_recap");
  if (step == SnippetStep::opening && !turns.empty()) {
    throw ContextViolation("opening requires an empty trial transcript");
  }
  if (step == SnippetStep::ending &&
      !(turns.size() == 2 && turns[0].kind == TurnKind::opening && turns[1].kind == TurnKind::human)) {
    throw ContextViolation("ending requires the opening and the human turn");
  }

  ChatRequest req;
  req.endpoint = "narrator";
  req.model = cfg.model_name;
  req.temperature = cfg.narrator_temperature;
  req.system = cfg.narrator_system_prompt;
  req.deadline_ms = cfg.deadline_ms;
  req.messages = history(context);
  const bool opening = step == SnippetStep::opening;
  req.messages.push_back({"user", opening ? "Step 1 of 3. Scenario: " + description.text + ". Start the story."
                                          : "Step 3 of 3. New element: " + description.text + ". End the story."});
  req.metadata = {{"step", opening ? "opening" : "ending"}, {"description", description.text},
                  {"cube", description.source_cube}};

  auto [text, violations] = run_with_retries(req, cfg.max_retries, transport, diag, [](const std::string& t) {
    std::vector<std::string> v;
    if (text::count_words(t) == 0) v.push_back("empty");
    if (text::count_words(t) > kMaxSnippetWords) v.push_back("too_long");
    if (text::contains_any_word(t, forbidden_narration_words())) v.push_back("forbidden_word");
    return v;
  });
  if (!violations.empty()) {
    std::string fixed =
        text::truncate_words(text::remove_words(text, forbidden_narration_words()), kMaxSnippetWords);
    if (text::count_words(fixed) == 0) {
      fixed = text::truncate_words(text::remove_words(description.text, forbidden_narration_words()),
                                   kMaxSnippetWords);
    }
    if (text::count_words(fixed) == 0) fixed = "And the story goes on.";
    warn(diag, {{"endpoint", "narrator"}, {"violations", violations}, {"original", text}, {"fixed", fixed}});
    text = fixed;
  }
  return StorySnippet{text, text::count_words(text), step, trial_index};
}

StorySnippet generate_recap(const StoryTranscript& transcript, const std::vector<std::string>& cube_terms,
                            const PromptConfig& cfg, Transport& transport, int trial_index,
                            Diagnostics* diag) {
  if (!transcript.ready_for_recap()) {
    throw IncompleteTranscript("recap needs the opening, the human turn and the ending");
  }
  StoryTranscript story;
  std::vector<std::string> texts;
  for (std::size_t i = 0; i < 3; ++i) {
    story.turns.push_back(transcript.turns[i]);
    texts.push_back(transcript.turns[i].text);
  }

  ChatRequest req;
  req.endpoint = "recap";
  req.model = cfg.model_name;
  req.temperature = cfg.narrator_temperature;
  req.system = cfg.narrator_system_prompt;
  req.deadline_ms = cfg.deadline_ms;
  req.messages = history(story);
  req.messages.push_back({"user", "Now tell a short recap of the whole story we created together."});
  req.metadata = {{"step", "recap"}, {"terms", cube_terms}, {"turns", texts}};

  auto [text, violations] =
      run_with_retries(req, cfg.max_retries, transport, diag, [&](const std::string& t) {
        std::vector<std::string> v;
        if (text::count_words(t) == 0) v.push_back("empty");
        for (const auto& term : cube_terms) {
          if (!text::contains_word(t, term)) v.push_back("missing:" + term);
        }
        if (text::contains_any_word(t, forbidden_narration_words())) v.push_back("forbidden_word");
        return v;
      });
  if (!violations.empty()) {
    std::string fixed = text::remove_words(text, forbidden_narration_words());
    if (text::count_words(fixed) == 0) {
      fixed.clear();
      for (const auto& t : texts) fixed += (fixed.empty() ? "" : " ") + t;
      fixed = text::remove_words(fixed, forbidden_narration_words());
    }
    warn(diag, {{"endpoint", "recap"}, {"violations", violations}, {"original", text}, {"fixed", fixed}});
    text = fixed;
  }
  return StorySnippet{text, text::count_words(text), SnippetStep::recap, trial_index};
}

}  // namespace narravine::genai
