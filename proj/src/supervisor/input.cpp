#include "narravine/supervisor/input.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace narravine::supervisor {

namespace {

bool is_text(const Json& p, const char* key) {
  return p.contains(key) && p.at(key).is_string() && !p.at(key).get<std::string>().empty();
}

bool is_num(const Json& p, const char* key) { return p.contains(key) && p.at(key).is_number(); }

void check_face(const Json& face) {
  if (!face.is_object() || !face.contains("identity") || !face.at("identity").is_number_integer()) {
    throw MalformedInput("face needs an integer identity");
  }
  if (!face.contains("bbox") || !face.at("bbox").is_object()) throw MalformedInput("face needs a bbox");
  const auto& b = face.at("bbox");
  for (const char* k : {"x", "y", "w", "h"}) {
    if (!is_num(b, k)) throw MalformedInput(std::string("bbox lacks ") + k);
  }
}

}  // namespace

void to_json(Json& j, const Input& in) {
  j = Json{{"kind", in.kind}, {"payload", in.payload}, {"at_ms", in.at_ms}};
}

std::optional<InputKind> parse_input_kind(const std::string& s) {
  if (s == "cube") return InputKind::hand_cube;
  if (s == "speech") return InputKind::speech_text;
  static const std::map<std::string, InputKind> names{
      {"face", InputKind::face},           {"gaze", InputKind::gaze},
      {"hand_cube", InputKind::hand_cube}, {"speech_text", InputKind::speech_text},
      {"silence", InputKind::silence},     {"cube_drop", InputKind::cube_drop},
      {"abort", InputKind::abort},         {"annotation", InputKind::annotation},
      {"force_retry", InputKind::force_retry}};
  auto it = names.find(s);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

void validate(const Input& in) {
  const auto& p = in.payload;
  if (!p.is_object()) throw MalformedInput("payload must be an object");
  switch (in.kind) {
    case InputKind::face:
      if (!p.contains("faces") || !p.at("faces").is_array()) throw MalformedInput("face needs a faces array");
      for (const auto& f : p.at("faces")) check_face(f);
      break;
    case InputKind::gaze:
      if (!is_num(p, "yaw") || !is_num(p, "pitch")) throw MalformedInput("gaze needs yaw and pitch");
      break;
    case InputKind::hand_cube:
      if (!is_text(p, "cube")) throw MalformedInput("hand_cube needs a cube id");
      if (p.contains("misdetect") && !p.at("misdetect").is_boolean()) {
        throw MalformedInput("misdetect must be a boolean");
      }
      break;
    case InputKind::speech_text:
      if (!is_text(p, "text")) throw MalformedInput("speech_text needs non-empty text");
      break;
    case InputKind::silence:
      if (!p.contains("ms") || !p.at("ms").is_number_integer() || p.at("ms").get<std::int64_t>() <= 0) {
        throw MalformedInput("silence needs a positive ms");
      }
      break;
    case InputKind::annotation: {
      bool any = false;
      for (const char* k : {"llm_added_elements", "llm_fixed_human"}) {
        if (!p.contains(k)) continue;
        if (!p.at(k).is_boolean()) throw MalformedInput(std::string(k) + " must be a boolean");
        any = true;
      }
      if (!any) throw MalformedInput("annotation sets no flag");
      if (p.contains("trial_index") && !p.at("trial_index").is_number_integer()) {
        throw MalformedInput("trial_index must be an integer");
      }
      break;
    }
    case InputKind::abort:
      if (p.contains("reason") && !p.at("reason").is_string()) throw MalformedInput("reason must be text");
      break;
    case InputKind::cube_drop:
    case InputKind::force_retry:
      break;
  }
}

Input input_from_json(const Json& body) {
  if (!body.is_object()) throw MalformedInput("input must be an object");
  if (!body.contains("kind") || !body.at("kind").is_string()) throw MalformedInput("input needs a kind");
  auto kind = parse_input_kind(body.at("kind").get<std::string>());
  if (!kind) throw MalformedInput("unknown input kind " + body.at("kind").get<std::string>());
  Input in;
  in.kind = *kind;
  if (body.contains("payload") && !body.at("payload").is_null()) in.payload = body.at("payload");
  validate(in);
  return in;
}

ScriptedSource::ScriptedSource(std::vector<Input> script, ManualClock& clock)
    : queue_(script.begin(), script.end()), clock_(clock) {}

std::optional<Input> ScriptedSource::next(std::int64_t deadline_ms) {
  while (!queue_.empty()) {
    const auto due = std::max({clock_.now_ms(), queue_.front().at_ms, quiet_until_});
    if (due > deadline_ms) break;
    Input in = std::move(queue_.front());
    queue_.pop_front();
    clock_.advance_to(due);
    if (in.kind == InputKind::silence) {
      quiet_until_ = due + in.payload.at("ms").get<std::int64_t>();
      continue;
    }
    return in;
  }
  if (deadline_ms != kNoDeadline) clock_.advance_to(deadline_ms);
  return std::nullopt;
}

void LiveSource::push(Input in) {
  {
    std::lock_guard lock(mu_);
    queue_.push_back(std::move(in));
  }
  cv_.notify_all();
}

void LiveSource::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool LiveSource::exhausted() const {
  std::lock_guard lock(mu_);
  return closed_ && queue_.empty();
}

std::optional<Input> LiveSource::next(std::int64_t deadline_ms) {
  std::unique_lock lock(mu_);
  auto ready = [&] { return !queue_.empty() || closed_; };
  if (deadline_ms == kNoDeadline) {
    cv_.wait(lock, ready);
  } else {
    const auto wait = std::max<std::int64_t>(0, deadline_ms - clock_.now_ms());
    cv_.wait_for(lock, std::chrono::milliseconds(wait), ready);
  }
  if (queue_.empty()) return std::nullopt;
  Input in = std::move(queue_.front());
  queue_.pop_front();
  in.at_ms = clock_.now_ms();
  return in;
}

}  // namespace narravine::supervisor
