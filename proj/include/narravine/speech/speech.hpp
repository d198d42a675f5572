#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

#include "narravine/common/clock.hpp"
#include "narravine/common/error.hpp"
#include "narravine/common/json.hpp"
#include "narravine/common/story.hpp"

namespace narravine::speech {

class AudioDeviceFailure : public Error {
 public:
  using Error::Error;
};

class RecognizerFailure : public Error {
 public:
  using Error::Error;
};

enum class Channel { audio, console };

NLOHMANN_JSON_SERIALIZE_ENUM(Channel, {{Channel::audio, "audio"}, {Channel::console, "console"}})

struct Utterance {
  std::string text;
  Speaker speaker = Speaker::robot;
  std::int64_t started_at = 0;
  std::int64_t ended_at = 0;
  Channel channel = Channel::console;

  bool operator==(const Utterance&) const = default;
};

void to_json(Json& j, const Utterance& u);
void from_json(const Json& j, Utterance& u);

// max(1 s, words x 300 ms)
std::int64_t speaking_duration_ms(const std::string& text);

enum class ListenStatus { heard, timeout, cancelled };

struct ListenResult {
  ListenStatus status = ListenStatus::timeout;
  std::optional<Utterance> utterance;
};

class SpeechIO {
 public:
  virtual ~SpeechIO() = default;
  virtual Utterance speak(const std::string& text) = 0;
  // Blocking. At most one listen may be active at a time.
  virtual ListenResult listen(Millis deadline) = 0;
  virtual void cancel() = 0;
  virtual Channel channel() const = 0;
};

// Text console channel. Spoken lines go to the sink (console port or
// gateway); heard lines arrive through submit().
//
// Besides the blocking listen(), the window calls (open_window / offer /
// expire) let an event loop drive listening without a thread.
class ConsoleSpeech final : public SpeechIO {
 public:
  using SpeakSink = std::function<void(const Utterance&)>;

  explicit ConsoleSpeech(Clock& clock, SpeakSink sink = {});

  Utterance speak(const std::string& text) override;
  ListenResult listen(Millis deadline) override;
  void cancel() override;
  Channel channel() const override { return Channel::console; }

  void submit(const std::string& text);

  void open_window(Millis deadline);
  std::optional<Utterance> offer(const std::string& text, std::int64_t at_ms);
  bool expire(std::int64_t now_ms);
  bool listening() const;
  std::optional<std::int64_t> window_deadline() const;
  std::uint64_t dropped() const;

 private:
  void open_locked(Millis deadline);

  Clock& clock_;
  SpeakSink sink_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool open_ = false;
  std::int64_t opened_at_ = 0;
  std::int64_t deadline_at_ = 0;
  std::uint64_t generation_ = 0;
  std::optional<ListenResult> result_;
  std::uint64_t dropped_ = 0;
};

// Hardware slot for a real synthesizer/recognizer pair.
class AudioBackend {
 public:
  virtual ~AudioBackend() = default;
  // Returns when playback ends. Throws AudioDeviceFailure.
  virtual void play(const std::string& text) = 0;
  // First final transcription, or nullopt at the deadline. Throws RecognizerFailure.
  virtual std::optional<std::string> recognize(Millis deadline) = 0;
  virtual void abort() = 0;
};

class AudioSpeech final : public SpeechIO {
 public:
  AudioSpeech(AudioBackend& backend, Clock& clock);

  Utterance speak(const std::string& text) override;
  ListenResult listen(Millis deadline) override;
  void cancel() override;
  Channel channel() const override { return Channel::audio; }

 private:
  AudioBackend& backend_;
  Clock& clock_;
  std::mutex mu_;
  bool listening_ = false;
  bool cancelled_ = false;
};

}  // namespace narravine::speech
