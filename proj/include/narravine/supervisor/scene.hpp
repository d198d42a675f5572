#pragma once

#include <optional>
#include <string>
#include <vector>

#include "narravine/common/json.hpp"
#include "narravine/supervisor/config.hpp"
#include "narravine/supervisor/input.hpp"

namespace narravine::supervisor {

class SceneError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// {name, trials?, participant_id?, perception?, genai?, events: [{at_ms, kind, params}]}
// genai holds an inline mock fixture; events must be ordered by at_ms.
struct Scene {
  std::string name;
  std::optional<int> trials;
  std::optional<std::string> participant_id;
  Json perception = Json::object();
  Json genai;
  std::vector<Input> events;
};

Scene parse_scene(const Json& j);
Scene load_scene(const std::string& path);

// Folds the scene's session settings into the config.
SessionConfig apply_scene(const SessionConfig& c, const Scene& s);

}  // namespace narravine::supervisor
