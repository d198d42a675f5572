#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "narravine/supervisor/runner.hpp"

namespace httplib {
class Server;
}

namespace narravine::supervisor {

class InputRejected : public Error {
 public:
  using Error::Error;
};

class SessionBusy : public Error {
 public:
  using Error::Error;
};

// Fan-out buffer behind the event stream. Keeps the most recent events so
// a reconnecting reader can resume from its last id.
class EventHub {
 public:
  explicit EventHub(std::size_t capacity = 2048) : capacity_(capacity) {}

  std::uint64_t publish(Json ev);
  // Events with id > after; waits up to timeout when there are none.
  std::vector<std::pair<std::uint64_t, Json>> wait_after(std::uint64_t after, Millis timeout);
  std::uint64_t last_id() const;
  void close();
  bool closed() const;

 private:
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::pair<std::uint64_t, Json>> events_;
  std::uint64_t next_id_ = 1;
  bool closed_ = false;
};

// Runs live sessions on a worker thread; the gateway's only entry point
// into the FSM.
class SessionController {
 public:
  SessionController(SessionConfig base, portnet::Bus* bus = nullptr);
  ~SessionController();

  // Idle snapshot before the first session.
  Json state() const;
  // Throws SessionBusy while a session runs, ConfigError on bad overrides.
  Json start(const Json& overrides);
  // Throws MalformedInput or InputRejected.
  void submit(const Json& body);

  bool running() const;
  // Blocks until the current session ends.
  std::optional<RunResult> wait();
  void stop();

  EventHub& hub() { return hub_; }
  std::string session_dir() const;

 private:
  void join();

  SessionConfig base_;
  portnet::Bus* bus_;
  std::unique_ptr<ScaledClock> clock_;
  EventHub hub_;
  mutable std::mutex mu_;
  std::unique_ptr<genai::Transport> transport_;
  std::unique_ptr<Supervisor> sup_;
  std::unique_ptr<LiveSource> source_;
  std::thread worker_;
  bool running_ = false;
  std::optional<RunResult> last_;
  std::string dir_;
  int sessions_ = 0;
};

// HTTP front: GET /api/state, GET /api/stream (text/event-stream),
// GET /api/graph, POST /api/input, POST /api/session/start.
class Gateway {
 public:
  explicit Gateway(SessionController& ctl);
  ~Gateway();

  // Binds and serves on a background thread; returns the bound port.
  int start(const std::string& host, int port);
  void stop();

 private:
  SessionController& ctl_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

// "host:port" with a default host of 127.0.0.1.
std::pair<std::string, int> parse_listen(const std::string& spec);

}  // namespace narravine::supervisor
