#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "narravine/common/json.hpp"

namespace narravine {

enum class Speaker { robot, human };
enum class SnippetStep { opening, ending, recap };
enum class TurnKind { opening, human, ending, recap };

NLOHMANN_JSON_SERIALIZE_ENUM(Speaker, {{Speaker::robot, "robot"}, {Speaker::human, "human"}})
NLOHMANN_JSON_SERIALIZE_ENUM(SnippetStep, {{SnippetStep::opening, "opening"},
                                           {SnippetStep::ending, "ending"},
                                           {SnippetStep::recap, "recap"}})
NLOHMANN_JSON_SERIALIZE_ENUM(TurnKind, {{TurnKind::opening, "opening"},
                                        {TurnKind::human, "human"},
                                        {TurnKind::ending, "ending"},
                                        {TurnKind::recap, "recap"}})

struct StickerDescription {
  std::string text;
  int word_count = 0;
  std::string source_cube;  // canonical sticker id of the cube actually shown
  std::int64_t latency_ms = 0;

  bool operator==(const StickerDescription&) const = default;
};

struct StorySnippet {
  std::string text;
  int word_count = 0;
  SnippetStep step = SnippetStep::opening;
  int trial_index = 0;

  bool operator==(const StorySnippet&) const = default;
};

struct StoryTurn {
  Speaker speaker = Speaker::robot;
  TurnKind kind = TurnKind::opening;
  std::string text;
  std::string cube_id;
  std::string cube_description;

  bool operator==(const StoryTurn&) const = default;
};

// Turns of one trial. A completed trial reads robot-opening, human,
// robot-ending, robot-recap.
struct StoryTranscript {
  std::vector<StoryTurn> turns;

  bool has(TurnKind k) const;
  // opening, human and ending present, in that order
  bool ready_for_recap() const;
  bool complete() const;

  bool operator==(const StoryTranscript&) const = default;
};

void to_json(Json& j, const StickerDescription& d);
void from_json(const Json& j, StickerDescription& d);
void to_json(Json& j, const StorySnippet& s);
void from_json(const Json& j, StorySnippet& s);
void to_json(Json& j, const StoryTurn& t);
void from_json(const Json& j, StoryTurn& t);
void to_json(Json& j, const StoryTranscript& t);
void from_json(const Json& j, StoryTranscript& t);

}  // namespace narravine
