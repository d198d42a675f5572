#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "narravine/common/error.hpp"
#include "narravine/common/json.hpp"
#include "narravine/fsm/config.hpp"
#include "narravine/genai/prompts.hpp"

namespace narravine::supervisor {

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ModuleBootFailure : public Error {
 public:
  using Error::Error;
};

inline constexpr const char* kInteractive = "interactive";

struct Timeouts {
  std::int64_t participant_ms = 30000;
  std::int64_t cube_ms = 60000;
  std::int64_t speech_ms = 90000;
  std::int64_t genai_ms = 30000;
};

struct PerceptionSettings {
  double misdetection_probability = 0.0;
  double noise_level = 0.0;
  std::uint64_t seed = 3;
  // detections below this confidence count as sticker misdetections
  double confidence_threshold = 0.5;
  // interactive sessions have no camera: synthesize the participant's face
  std::optional<bool> auto_face;
};

struct SessionConfig {
  int trials_total = 3;
  std::string manifest;  // empty: shipped stickers.json
  std::string scene = kInteractive;
  std::string genai_transport = "mock";  // mock | live
  std::string genai_fixture;             // mock only, optional
  std::string genai_base_url = "https://api.openai.com";
  Timeouts timeouts;
  int max_retries = 2;        // FSM retries per failure kind
  int genai_max_retries = 1;  // extra attempts per GenAI call
  std::uint16_t port_base = 0;  // 0: no middleware ports
  std::string output_dir;
  std::string participant_id = "participant";
  std::uint64_t seed = 7;
  std::string vlm_input = "text";
  // live sessions only: simulated speaking and GenAI latency run this much faster
  double speedup = 1.0;
  PerceptionSettings perception;
  fsm::SpeechTemplates templates;

  bool interactive() const { return scene == kInteractive; }
  std::string manifest_path() const;
  bool auto_face() const { return perception.auto_face.value_or(interactive()); }
};

void to_json(Json& j, const SessionConfig& c);
// Unknown keys are rejected so typos do not silently fall back to defaults.
// Relative paths are resolved against base_dir when it is non-empty.
SessionConfig parse_config(const Json& j, const std::string& base_dir = {});
SessionConfig load_config(const std::string& path);

// Throws ConfigError when a referenced file is missing or a value is out of range.
void validate(const SessionConfig& c);

// Returns c with the JSON overrides applied (same schema as the file).
SessionConfig apply_overrides(const SessionConfig& c, const Json& overrides);

fsm::FsmConfig fsm_config(const SessionConfig& c);
genai::PromptConfig prompt_config(const SessionConfig& c);

}  // namespace narravine::supervisor
