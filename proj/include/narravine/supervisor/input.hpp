#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "narravine/common/clock.hpp"
#include "narravine/common/error.hpp"
#include "narravine/common/json.hpp"

namespace narravine::supervisor {

class MalformedInput : public Error {
 public:
  using Error::Error;
};

// External stimuli. Scene scripts and gateway posts share this encoding,
// so the runner cannot tell them apart.
enum class InputKind { face, gaze, hand_cube, speech_text, silence, cube_drop, abort, annotation, force_retry };

NLOHMANN_JSON_SERIALIZE_ENUM(InputKind, {{InputKind::face, "face"},
                                         {InputKind::gaze, "gaze"},
                                         {InputKind::hand_cube, "hand_cube"},
                                         {InputKind::speech_text, "speech_text"},
                                         {InputKind::silence, "silence"},
                                         {InputKind::cube_drop, "cube_drop"},
                                         {InputKind::abort, "abort"},
                                         {InputKind::annotation, "annotation"},
                                         {InputKind::force_retry, "force_retry"}})

struct Input {
  InputKind kind = InputKind::hand_cube;
  Json payload = Json::object();
  std::int64_t at_ms = 0;
};

void to_json(Json& j, const Input& in);

// Accepts the gateway names and the scene aliases "cube" and "speech".
std::optional<InputKind> parse_input_kind(const std::string& s);

// Throws MalformedInput when the payload does not fit the kind.
void validate(const Input& in);
// {kind, payload} document as posted to the gateway.
Input input_from_json(const Json& body);

inline constexpr std::int64_t kNoDeadline = std::numeric_limits<std::int64_t>::max();

class InputSource {
 public:
  virtual ~InputSource() = default;
  // Next input arriving before deadline_ms (clock time), or nullopt once
  // the deadline has passed or the source is exhausted.
  virtual std::optional<Input> next(std::int64_t deadline_ms) = 0;
  virtual bool exhausted() const = 0;
};

// Delivers a timed script on a manual clock. An input is due at
// max(now, at_ms); a silence input holds back everything after it for
// params.ms.
class ScriptedSource final : public InputSource {
 public:
  ScriptedSource(std::vector<Input> script, ManualClock& clock);

  std::optional<Input> next(std::int64_t deadline_ms) override;
  bool exhausted() const override { return queue_.empty(); }

 private:
  std::deque<Input> queue_;
  ManualClock& clock_;
  std::int64_t quiet_until_ = 0;
};

// Thread-safe queue fed by the gateway.
class LiveSource final : public InputSource {
 public:
  explicit LiveSource(Clock& clock) : clock_(clock) {}

  void push(Input in);
  void close();

  std::optional<Input> next(std::int64_t deadline_ms) override;
  bool exhausted() const override;

 private:
  Clock& clock_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Input> queue_;
  bool closed_ = false;
};

}  // namespace narravine::supervisor
