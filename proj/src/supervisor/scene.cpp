#include "narravine/supervisor/scene.hpp"

#include <filesystem>
#include <fstream>

namespace narravine::supervisor {

Scene parse_scene(const Json& j) {
  if (!j.is_object()) throw SceneError("scene must be an object");
  for (const auto& [k, v] : j.items()) {
    if (k != "name" && k != "trials" && k != "participant_id" && k != "perception" && k != "genai" &&
        k != "events" && k != "description") {
      throw SceneError("unknown scene key '" + k + "'");
    }
  }
  Scene s;
  try {
    s.name = j.value("name", "");
    if (j.contains("trials")) s.trials = j.at("trials").get<int>();
    if (j.contains("participant_id")) s.participant_id = j.at("participant_id").get<std::string>();
    if (j.contains("perception")) s.perception = j.at("perception");
    if (j.contains("genai")) s.genai = j.at("genai");
  } catch (const Json::exception& e) {
    throw SceneError(std::string("malformed scene header: ") + e.what());
  }
  if (!j.contains("events") || !j.at("events").is_array()) throw SceneError("scene needs an events array");
  std::int64_t last = 0;
  int index = 0;
  for (const auto& e : j.at("events")) {
    const auto where = "event " + std::to_string(index++);
    if (!e.is_object() || !e.contains("kind") || !e.at("kind").is_string()) {
      throw SceneError(where + " needs a kind");
    }
    auto kind = parse_input_kind(e.at("kind").get<std::string>());
    if (!kind) throw SceneError(where + ": unknown kind " + e.at("kind").get<std::string>());
    Input in;
    in.kind = *kind;
    if (e.contains("at_ms")) {
      if (!e.at("at_ms").is_number_integer()) throw SceneError(where + ": at_ms must be an integer");
      in.at_ms = e.at("at_ms").get<std::int64_t>();
    } else {
      in.at_ms = last;
    }
    if (in.at_ms < last) throw SceneError(where + ": events must be ordered by at_ms");
    last = in.at_ms;
    if (e.contains("params")) in.payload = e.at("params");
    try {
      validate(in);
    } catch (const MalformedInput& err) {
      throw SceneError(where + ": " + err.what());
    }
    s.events.push_back(std::move(in));
  }
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("cannot read scene " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw SceneError("scene " + path + " is not valid JSON: " + e.what());
  }
  auto s = parse_scene(j);
  if (s.name.empty()) s.name = std::filesystem::path(path).stem().string();
  return s;
}

SessionConfig apply_scene(const SessionConfig& c, const Scene& s) {
  Json overrides = Json::object();
  if (s.trials) overrides["trials_total"] = *s.trials;
  if (s.participant_id) overrides["participant_id"] = *s.participant_id;
  if (!s.perception.empty()) overrides["perception"] = s.perception;
  auto out = apply_overrides(c, overrides);
  validate(out);
  return out;
}

}  // namespace narravine::supervisor
