#include "narravine/common/clock.hpp"

#include <thread>

namespace narravine {

std::int64_t wall_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::int64_t SystemClock::now_ms() const { return wall_clock_ms(); }

void SystemClock::sleep_for(Millis d) {
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

std::int64_t ScaledClock::now_ms() const { return wall_clock_ms(); }

void ScaledClock::sleep_for(Millis d) {
  if (d.count() > 0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(d.count() / speedup_));
}

void ManualClock::advance_to(std::int64_t t_ms) {
  auto cur = now_.load();
  while (t_ms > cur && !now_.compare_exchange_weak(cur, t_ms)) {
  }
}

}  // namespace narravine
