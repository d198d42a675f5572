#include "narravine/common/story.hpp"

#include <algorithm>


namespace narravine {

bool StoryTranscript::has(TurnKind k) const {
  return std::any_of(turns.begin(), turns.end(), [k](const StoryTurn& t) { return t.kind == k; });
}

bool StoryTranscript::ready_for_recap() const {
  static constexpr TurnKind order[] = {TurnKind::opening, TurnKind::human, TurnKind::ending};
  std::size_t next = 0;
  for (const auto& t : turns) {
    if (next < 3 && t.kind == order[next]) ++next;
  }
  return next == 3;
}

bool StoryTranscript::complete() const {
  return turns.size() == 4 && turns[0].kind == TurnKind::opening &&
         turns[1].kind == TurnKind::human && turns[2].kind == TurnKind::ending &&
         turns[3].kind == TurnKind::recap;
}

void to_json(Json& j, const StickerDescription& d) {
  j = Json{{"text", d.text},
           {"word_count", d.word_count},
           {"source_cube", d.source_cube},
           {"latency_ms", d.latency_ms}};
}

void from_json(const Json& j, StickerDescription& d) {
  j.at("text").get_to(d.text);
  j.at("word_count").get_to(d.word_count);
  j.at("source_cube").get_to(d.source_cube);
  d.latency_ms = j.value("latency_ms", std::int64_t{0});
}

void to_json(Json& j, const StorySnippet& s) {
  j = Json{{"text", s.text}, {"word_count", s.word_count}, {"step", s.step},
           {"trial_index", s.trial_index}};
}

void from_json(const Json& j, StorySnippet& s) {
  j.at("text").get_to(s.text);
  j.at("word_count").get_to(s.word_count);
  j.at("step").get_to(s.step);
  j.at("trial_index").get_to(s.trial_index);
}

void to_json(Json& j, const StoryTurn& t) {
  j = Json{{"speaker", t.speaker},
           {"kind", t.kind},
           {"text", t.text},
           {"cube_id", t.cube_id},
           {"cube_description", t.cube_description}};
}

void from_json(const Json& j, StoryTurn& t) {
  j.at("speaker").get_to(t.speaker);
  j.at("kind").get_to(t.kind);
  j.at("text").get_to(t.text);
  t.cube_id = j.value("cube_id", "");
  t.cube_description = j.value("cube_description", "");
}

void to_json(Json& j, const StoryTranscript& t) { j = Json{{"turns", t.turns}}; }

void from_json(const Json& j, StoryTranscript& t) { j.at("turns").get_to(t.turns); }

}  // namespace narravine
