#include "narravine/supervisor/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "narravine/common/paths.hpp"
#include "narravine/common/stickers.hpp"

namespace narravine::supervisor {

namespace fs = std::filesystem;

namespace {

void check_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

std::string resolve(const std::string& p, const std::string& base_dir) {
  if (p.empty() || p == kInteractive || base_dir.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string SessionConfig::manifest_path() const {
  return manifest.empty() ? data_path("stickers.json") : manifest;
}

void to_json(Json& j, const SessionConfig& c) {
  Json perception{{"misdetection_probability", c.perception.misdetection_probability},
                  {"noise_level", c.perception.noise_level},
                  {"seed", c.perception.seed},
                  {"confidence_threshold", c.perception.confidence_threshold}};
  if (c.perception.auto_face) perception["auto_face"] = *c.perception.auto_face;
  j = Json{{"trials_total", c.trials_total},
           {"manifest", c.manifest},
           {"scene", c.scene},
           {"genai",
            {{"transport", c.genai_transport},
             {"fixture", c.genai_fixture},
             {"base_url", c.genai_base_url},
             {"vlm_input", c.vlm_input}}},
           {"timeouts",
            {{"participant_ms", c.timeouts.participant_ms},
             {"cube_ms", c.timeouts.cube_ms},
             {"speech_ms", c.timeouts.speech_ms},
             {"genai_ms", c.timeouts.genai_ms}}},
           {"retries", {{"fsm", c.max_retries}, {"genai", c.genai_max_retries}}},
           {"port_base", c.port_base},
           {"output_dir", c.output_dir},
           {"participant_id", c.participant_id},
           {"seed", c.seed},
           {"speedup", c.speedup},
           {"perception", perception},
           {"templates", c.templates}};
}

SessionConfig parse_config(const Json& j, const std::string& base_dir) {
  SessionConfig c;
  try {
    check_keys(j, "config",
               {"trials_total", "manifest", "scene", "genai", "timeouts", "retries", "port_base",
                "output_dir", "participant_id", "seed", "speedup", "perception", "templates"});
    read(j, "trials_total", c.trials_total);
    read(j, "manifest", c.manifest);
    read(j, "scene", c.scene);
    read(j, "output_dir", c.output_dir);
    read(j, "participant_id", c.participant_id);
    read(j, "seed", c.seed);
    read(j, "speedup", c.speedup);
    read(j, "port_base", c.port_base);
    if (j.contains("genai")) {
      const auto& g = j.at("genai");
      check_keys(g, "genai", {"transport", "fixture", "base_url", "vlm_input"});
      read(g, "transport", c.genai_transport);
      read(g, "fixture", c.genai_fixture);
      read(g, "base_url", c.genai_base_url);
      read(g, "vlm_input", c.vlm_input);
    }
    if (j.contains("timeouts")) {
      const auto& t = j.at("timeouts");
      check_keys(t, "timeouts", {"participant_ms", "cube_ms", "speech_ms", "genai_ms"});
      read(t, "participant_ms", c.timeouts.participant_ms);
      read(t, "cube_ms", c.timeouts.cube_ms);
      read(t, "speech_ms", c.timeouts.speech_ms);
      read(t, "genai_ms", c.timeouts.genai_ms);
    }
    if (j.contains("retries")) {
      const auto& r = j.at("retries");
      check_keys(r, "retries", {"fsm", "genai"});
      read(r, "fsm", c.max_retries);
      read(r, "genai", c.genai_max_retries);
    }
    if (j.contains("perception")) {
      const auto& p = j.at("perception");
      check_keys(p, "perception",
                 {"misdetection_probability", "noise_level", "seed", "confidence_threshold", "auto_face"});
      read(p, "misdetection_probability", c.perception.misdetection_probability);
      read(p, "noise_level", c.perception.noise_level);
      read(p, "seed", c.perception.seed);
      read(p, "confidence_threshold", c.perception.confidence_threshold);
      if (p.contains("auto_face") && !p.at("auto_face").is_null()) {
        c.perception.auto_face = p.at("auto_face").get<bool>();
      }
    }
    if (j.contains("templates")) c.templates = j.at("templates").get<fsm::SpeechTemplates>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  c.manifest = resolve(c.manifest, base_dir);
  c.scene = resolve(c.scene, base_dir);
  c.genai_fixture = resolve(c.genai_fixture, base_dir);
  c.output_dir = resolve(c.output_dir, base_dir);
  return c;
}

SessionConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_config(j, fs::path(path).parent_path().string());
}

void validate(const SessionConfig& c) {
  if (c.trials_total < 1) throw ConfigError("trials_total must be at least 1");
  const auto manifest = c.manifest_path();
  if (!fs::exists(manifest)) throw ConfigError("sticker manifest not found: " + manifest);
  try {
    if (StickerManifest::load(manifest).entries().empty()) {
      throw ConfigError("sticker manifest is empty: " + manifest);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("bad sticker manifest " + manifest + ": " + e.what());
  }
  if (!c.interactive() && !fs::exists(c.scene)) throw ConfigError("scene not found: " + c.scene);
  if (c.genai_transport != "mock" && c.genai_transport != "live") {
    throw ConfigError("genai transport must be mock or live, got " + c.genai_transport);
  }
  if (!c.genai_fixture.empty() && !fs::exists(c.genai_fixture)) {
    throw ConfigError("mock fixture not found: " + c.genai_fixture);
  }
  if (c.genai_transport == "live" && !std::getenv("NARRAVINE_API_KEY")) {
    throw ConfigError("live GenAI transport needs NARRAVINE_API_KEY");
  }
  if (c.vlm_input != "text" && c.vlm_input != "image") throw ConfigError("vlm_input must be text or image");
  const auto& t = c.timeouts;
  if (t.participant_ms <= 0 || t.cube_ms <= 0 || t.speech_ms <= 0 || t.genai_ms <= 0) {
    throw ConfigError("timeouts must be positive");
  }
  if (c.speedup < 1.0) throw ConfigError("speedup must be >= 1");
  if (c.max_retries < 0 || c.genai_max_retries < 0) throw ConfigError("retry maxima must be >= 0");
  const auto& p = c.perception;
  if (p.misdetection_probability < 0 || p.misdetection_probability > 1) {
    throw ConfigError("misdetection_probability must be in [0, 1]");
  }
  if (p.noise_level < 0 || p.noise_level > 1) throw ConfigError("noise_level must be in [0, 1]");
  if (p.confidence_threshold <= 0 || p.confidence_threshold > 1) {
    throw ConfigError("confidence_threshold must be in (0, 1]");
  }
}

SessionConfig apply_overrides(const SessionConfig& c, const Json& overrides) {
  if (overrides.is_null()) return c;
  if (!overrides.is_object()) throw ConfigError("overrides must be an object");
  Json j = c;
  j.merge_patch(overrides);
  return parse_config(j);
}

fsm::FsmConfig fsm_config(const SessionConfig& c) {
  fsm::FsmConfig f;
  f.trials_total = c.trials_total;
  f.max_retries = c.max_retries;
  f.seed = c.seed;
  f.templates = c.templates;
  return f;
}

genai::PromptConfig prompt_config(const SessionConfig& c) {
  genai::PromptConfig p;
  p.max_retries = c.genai_max_retries;
  p.deadline_ms = c.timeouts.genai_ms;
  p.vlm_input = c.vlm_input == "image" ? genai::VlmInput::image : genai::VlmInput::text;
  return p;
}

}  // namespace narravine::supervisor
