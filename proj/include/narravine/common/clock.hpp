#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>

namespace narravine {

using Millis = std::chrono::milliseconds;

/// Time source shared by the supervisor, speech and perception simulators.
/// Replays run on a ManualClock so simulated durations never sleep.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() const = 0;
  virtual void sleep_for(Millis d) = 0;
  virtual bool is_virtual() const = 0;
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_ms() const override;
  void sleep_for(Millis d) override;
  bool is_virtual() const override { return false; }
};

// Wall time, but simulated durations pass `speedup` times faster.
class ScaledClock final : public Clock {
 public:
  explicit ScaledClock(double speedup = 1.0) : speedup_(speedup < 1.0 ? 1.0 : speedup) {}

  std::int64_t now_ms() const override;
  void sleep_for(Millis d) override;
  bool is_virtual() const override { return false; }

 private:
  double speedup_;
};

class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::int64_t start_ms = 0) : now_(start_ms) {}

  std::int64_t now_ms() const override { return now_.load(); }
  void sleep_for(Millis d) override { now_ += d.count(); }
  bool is_virtual() const override { return true; }

  // Moves forward only; earlier targets are ignored.
  void advance_to(std::int64_t t_ms);

 private:
  std::atomic<std::int64_t> now_;
};

std::int64_t wall_clock_ms();

}  // namespace narravine
