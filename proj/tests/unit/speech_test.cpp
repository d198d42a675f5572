#include <gtest/gtest.h>

#include <future>
#include <thread>

#include "narravine/speech/speech.hpp"

namespace narravine::speech {
namespace {

using namespace std::chrono_literals;

TEST(SpeakTest, DurationFollowsWordCount) {
  EXPECT_EQ(speaking_duration_ms("one two three four five six seven eight nine ten"), 3000);
  EXPECT_EQ(speaking_duration_ms("hello"), 1000);
  EXPECT_EQ(speaking_duration_ms("a b c d"), 1200);
}

TEST(SpeakTest, ConsoleSpeakAdvancesVirtualTime) {
  ManualClock clock(500);
  std::vector<Utterance> sent;
  ConsoleSpeech s(clock, [&](const Utterance& u) { sent.push_back(u); });
  auto u = s.speak("one two three four five six seven eight nine ten");
  EXPECT_EQ(u.started_at, 500);
  EXPECT_EQ(u.ended_at, 3500);
  EXPECT_EQ(clock.now_ms(), 3500);
  EXPECT_EQ(u.speaker, Speaker::robot);
  ASSERT_EQ(sent.size(), 1u);
  EXPECT_THROW(s.speak(""), PreconditionViolation);
  EXPECT_THROW(s.speak("   "), PreconditionViolation);
}

TEST(ListenTest, ConsoleLineWithinDeadline) {
  SystemClock clock;
  ConsoleSpeech s(clock);
  auto fut = std::async(std::launch::async, [&] { return s.listen(2000ms); });
  while (!s.listening()) std::this_thread::sleep_for(1ms);
  s.submit("the alien found the castle");
  auto r = fut.get();
  ASSERT_EQ(r.status, ListenStatus::heard);
  EXPECT_EQ(r.utterance->text, "the alien found the castle");
  EXPECT_EQ(r.utterance->speaker, Speaker::human);
  EXPECT_GE(r.utterance->ended_at, r.utterance->started_at);
}

TEST(ListenTest, SilenceTimesOut) {
  SystemClock clock;
  ConsoleSpeech s(clock);
  auto r = s.listen(50ms);
  EXPECT_EQ(r.status, ListenStatus::timeout);
  EXPECT_FALSE(s.listening());

  ManualClock virt;
  ConsoleSpeech v(virt);
  EXPECT_EQ(v.listen(8000ms).status, ListenStatus::timeout);
  EXPECT_EQ(virt.now_ms(), 8000);
}

TEST(ListenTest, SecondConcurrentListenIsRejected) {
  SystemClock clock;
  ConsoleSpeech s(clock);
  auto fut = std::async(std::launch::async, [&] { return s.listen(2000ms); });
  while (!s.listening()) std::this_thread::sleep_for(1ms);
  EXPECT_THROW(s.listen(100ms), PreconditionViolation);
  s.cancel();
  EXPECT_EQ(fut.get().status, ListenStatus::cancelled);
}

TEST(ListenTest, CancelThenDrainDropsLateInput) {
  ManualClock clock;
  ConsoleSpeech s(clock);
  s.open_window(5000ms);
  s.cancel();
  EXPECT_FALSE(s.offer("too late", 100));
  EXPECT_EQ(s.dropped(), 1u);
  s.open_window(5000ms);
  EXPECT_FALSE(s.offer("after deadline", 6000));
  auto u = s.offer("in time", 4000);
  ASSERT_TRUE(u);
  EXPECT_EQ(u->ended_at, 4000);
  EXPECT_FALSE(s.listening());
}

TEST(ListenTest, WindowExpiry) {
  ManualClock clock(1000);
  ConsoleSpeech s(clock);
  s.open_window(3000ms);
  EXPECT_EQ(s.window_deadline(), 4000);
  EXPECT_FALSE(s.expire(3999));
  EXPECT_TRUE(s.expire(4000));
  EXPECT_FALSE(s.window_deadline());
}

// Hammer cancel and submit from two threads: every listen ends exactly once.
TEST(ListenTest, CancelRacesSubmitSafely) {
  SystemClock clock;
  ConsoleSpeech s(clock);
  for (int i = 0; i < 200; ++i) {
    auto fut = std::async(std::launch::async, [&] { return s.listen(1000ms); });
    while (!s.listening()) std::this_thread::yield();
    std::thread a([&] { s.submit("hi"); });
    std::thread b([&] { s.cancel(); });
    a.join();
    b.join();
    auto r = fut.get();
    ASSERT_NE(r.status, ListenStatus::timeout);
    ASSERT_EQ(r.status == ListenStatus::heard, r.utterance.has_value());
    ASSERT_FALSE(s.listening());
  }
}

struct FakeBackend : AudioBackend {
  bool broken_device = false;
  bool broken_recognizer = false;
  std::optional<std::string> next;
  ManualClock* clock = nullptr;

  void play(const std::string& text) override {
    if (broken_device) throw AudioDeviceFailure("no speaker");
    clock->sleep_for(Millis(speaking_duration_ms(text)));
  }
  std::optional<std::string> recognize(Millis) override {
    if (broken_recognizer) throw RecognizerFailure("service down");
    return next;
  }
  void abort() override {}
};

TEST(AudioTest, AdapterContract) {
  ManualClock clock;
  FakeBackend be;
  be.clock = &clock;
  AudioSpeech s(be, clock);
  auto u = s.speak("hello there");
  EXPECT_EQ(u.channel, Channel::audio);
  EXPECT_EQ(u.ended_at - u.started_at, 1000);
  be.next = "once upon a time";
  auto r = s.listen(5000ms);
  ASSERT_EQ(r.status, ListenStatus::heard);
  EXPECT_EQ(r.utterance->text, "once upon a time");
  be.next.reset();
  EXPECT_EQ(s.listen(5000ms).status, ListenStatus::timeout);
  be.broken_recognizer = true;
  EXPECT_THROW(s.listen(5000ms), RecognizerFailure);
  be.broken_recognizer = false;
  EXPECT_EQ(s.listen(5000ms).status, ListenStatus::timeout);  // not stuck after the failure
  be.broken_device = true;
  EXPECT_THROW(s.speak("hi"), AudioDeviceFailure);
}

}  // namespace
}  // namespace narravine::speech
