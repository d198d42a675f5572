#include "narravine/speech/speech.hpp"

#include <algorithm>

#include "narravine/common/text.hpp"

namespace narravine::speech {

void to_json(Json& j, const Utterance& u) {
  j = Json{{"text", u.text},           {"speaker", u.speaker}, {"started_at", u.started_at},
           {"ended_at", u.ended_at}, {"channel", u.channel}};
}

void from_json(const Json& j, Utterance& u) {
  j.at("text").get_to(u.text);
  j.at("speaker").get_to(u.speaker);
  j.at("started_at").get_to(u.started_at);
  j.at("ended_at").get_to(u.ended_at);
  u.channel = j.value("channel", Channel::console);
}

std::int64_t speaking_duration_ms(const std::string& text) {
  return std::max<std::int64_t>(1000, static_cast<std::int64_t>(text::count_words(text)) * 300);
}

ConsoleSpeech::ConsoleSpeech(Clock& clock, SpeakSink sink) : clock_(clock), sink_(std::move(sink)) {}

Utterance ConsoleSpeech::speak(const std::string& text) {
  if (text::trim(text).empty()) throw PreconditionViolation("speak needs non-empty text");
  const auto duration = speaking_duration_ms(text);
  Utterance u{text, Speaker::robot, clock_.now_ms(), clock_.now_ms() + duration, Channel::console};
  // published when speech starts so the console shows it while it plays
  if (sink_) sink_(u);
  clock_.sleep_for(Millis(duration));
  return u;
}

void ConsoleSpeech::open_locked(Millis deadline) {
  if (open_) throw PreconditionViolation("a listen is already active");
  open_ = true;
  ++generation_;
  result_.reset();
  opened_at_ = clock_.now_ms();
  deadline_at_ = opened_at_ + deadline.count();
}

void ConsoleSpeech::open_window(Millis deadline) {
  std::lock_guard lock(mu_);
  open_locked(deadline);
}

std::optional<Utterance> ConsoleSpeech::offer(const std::string& text, std::int64_t at_ms) {
  std::lock_guard lock(mu_);
  if (!open_ || at_ms > deadline_at_ || text::trim(text).empty()) {
    ++dropped_;
    return std::nullopt;
  }
  Utterance u{text::trim(text), Speaker::human, std::max(opened_at_, at_ms - speaking_duration_ms(text)),
              at_ms, Channel::console};
  u.started_at = std::min(u.started_at, u.ended_at);
  open_ = false;
  result_ = ListenResult{ListenStatus::heard, u};
  cv_.notify_all();
  return u;
}

bool ConsoleSpeech::expire(std::int64_t now_ms) {
  std::lock_guard lock(mu_);
  if (!open_ || now_ms < deadline_at_) return false;
  open_ = false;
  result_ = ListenResult{ListenStatus::timeout, std::nullopt};
  cv_.notify_all();
  return true;
}

void ConsoleSpeech::cancel() {
  std::lock_guard lock(mu_);
  if (!open_) return;
  open_ = false;
  result_ = ListenResult{ListenStatus::cancelled, std::nullopt};
  cv_.notify_all();
}

bool ConsoleSpeech::listening() const {
  std::lock_guard lock(mu_);
  return open_;
}

std::optional<std::int64_t> ConsoleSpeech::window_deadline() const {
  std::lock_guard lock(mu_);
  if (!open_) return std::nullopt;
  return deadline_at_;
}

std::uint64_t ConsoleSpeech::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}

void ConsoleSpeech::submit(const std::string& text) { offer(text, clock_.now_ms()); }

ListenResult ConsoleSpeech::listen(Millis deadline) {
  std::unique_lock lock(mu_);
  open_locked(deadline);
  const auto gen = generation_;
  if (clock_.is_virtual()) {
    // Nobody can type while virtual time stands still.
    lock.unlock();
    clock_.sleep_for(deadline);
    expire(clock_.now_ms());
    lock.lock();
  } else {
    cv_.wait_for(lock, deadline, [&] { return generation_ != gen || !open_; });
    if (open_ && generation_ == gen) {
      open_ = false;
      result_ = ListenResult{ListenStatus::timeout, std::nullopt};
    }
  }
  return result_.value_or(ListenResult{});
}

AudioSpeech::AudioSpeech(AudioBackend& backend, Clock& clock) : backend_(backend), clock_(clock) {}

Utterance AudioSpeech::speak(const std::string& text) {
  if (text::trim(text).empty()) throw PreconditionViolation("speak needs non-empty text");
  Utterance u{text, Speaker::robot, clock_.now_ms(), 0, Channel::audio};
  backend_.play(text);
  u.ended_at = std::max(u.started_at, clock_.now_ms());
  return u;
}

ListenResult AudioSpeech::listen(Millis deadline) {
  {
    std::lock_guard lock(mu_);
    if (listening_) throw PreconditionViolation("a listen is already active");
    listening_ = true;
    cancelled_ = false;
  }
  const auto start = clock_.now_ms();
  std::optional<std::string> heard;
  try {
    heard = backend_.recognize(deadline);
  } catch (...) {
    std::lock_guard lock(mu_);
    listening_ = false;
    throw;
  }
  std::lock_guard lock(mu_);
  listening_ = false;
  if (cancelled_) return {ListenStatus::cancelled, std::nullopt};
  if (!heard || text::trim(*heard).empty()) return {ListenStatus::timeout, std::nullopt};
  return {ListenStatus::heard,
          Utterance{text::trim(*heard), Speaker::human, start, std::max(start, clock_.now_ms()), Channel::audio}};
}

void AudioSpeech::cancel() {
  std::lock_guard lock(mu_);
  if (!listening_) return;
  cancelled_ = true;
  backend_.abort();
}

}  // namespace narravine::speech
