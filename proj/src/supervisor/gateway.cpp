#include "narravine/supervisor/gateway.hpp"

#include <filesystem>

#include <httplib.h>
#include <spdlog/spdlog.h>

namespace narravine::supervisor {

std::uint64_t EventHub::publish(Json ev) {
  std::uint64_t id;
  {
    std::lock_guard lock(mu_);
    id = next_id_++;
    events_.emplace_back(id, std::move(ev));
    while (events_.size() > capacity_) events_.pop_front();
  }
  cv_.notify_all();
  return id;
}

std::vector<std::pair<std::uint64_t, Json>> EventHub::wait_after(std::uint64_t after, Millis timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || (!events_.empty() && events_.back().first > after); });
  std::vector<std::pair<std::uint64_t, Json>> out;
  for (const auto& e : events_) {
    if (e.first > after) out.push_back(e);
  }
  return out;
}

std::uint64_t EventHub::last_id() const {
  std::lock_guard lock(mu_);
  return next_id_ - 1;
}

void EventHub::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool EventHub::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

SessionController::SessionController(SessionConfig base, portnet::Bus* bus)
    : base_(std::move(base)), bus_(bus) {}

SessionController::~SessionController() { stop(); }

Json SessionController::state() const {
  std::lock_guard lock(mu_);
  if (!sup_) {
    Json j = fsm::initial_state(fsm_config(base_), base_.participant_id);
    j["admissible"] = Json::array({fsm::EventKind::StartSession});
    j["records"] = 0;
    j["running"] = false;
    return j;
  }
  Json j = sup_->state_json();
  j["running"] = running_;
  j["session_dir"] = dir_;
  return j;
}

std::string SessionController::session_dir() const {
  std::lock_guard lock(mu_);
  return dir_;
}

bool SessionController::running() const {
  std::lock_guard lock(mu_);
  return running_;
}

Json SessionController::start(const Json& overrides) {
  join();
  std::lock_guard lock(mu_);
  if (running_) throw SessionBusy("a session is already running");
  auto cfg = apply_overrides(base_, overrides.is_null() ? Json::object() : overrides);
  cfg.scene = kInteractive;
  validate(cfg);
  ++sessions_;
  const auto root = cfg.output_dir.empty() ? std::string("sessions") : cfg.output_dir;
  cfg.output_dir = (std::filesystem::path(root) / (cfg.participant_id + "-" + std::to_string(wall_clock_ms()) +
                                                   "-" + std::to_string(sessions_)))
                       .string();
  dir_ = cfg.output_dir;
  sup_.reset();
  clock_ = std::make_unique<ScaledClock>(cfg.speedup);
  transport_ = make_transport(cfg, *clock_);
  sup_ = std::make_unique<Supervisor>(cfg, *clock_, *transport_, bus_);
  sup_->set_observer([this](const Json& ev) { hub_.publish(ev); });
  source_ = std::make_unique<LiveSource>(*clock_);
  running_ = true;
  last_.reset();
  worker_ = std::thread([this] {
    RunResult r;
    try {
      r = sup_->run(*source_);
    } catch (const std::exception& e) {
      spdlog::error("session failed: {}", e.what());
      r.status = RunStatus::stalled;
      hub_.publish({{"type", "session_error"}, {"reason", e.what()}});
    }
    std::lock_guard lock(mu_);
    last_ = std::move(r);
    running_ = false;
  });
  hub_.publish({{"type", "session_start"}, {"session_dir", dir_}});
  Json j = sup_->state_json();
  j["running"] = true;
  j["session_dir"] = dir_;
  return j;
}

void SessionController::submit(const Json& body) {
  auto in = input_from_json(body);
  switch (in.kind) {
    case InputKind::hand_cube:
    case InputKind::speech_text:
    case InputKind::annotation:
    case InputKind::abort:
    case InputKind::force_retry:
      break;
    default:
      throw MalformedInput("kind not accepted over the gateway");
  }
  std::lock_guard lock(mu_);
  if (!sup_ || !running_) throw InputRejected("no session running");
  const auto s = sup_->state();
  bool ok = false;
  switch (in.kind) {
    case InputKind::hand_cube: ok = fsm::is_admissible(s, fsm::EventKind::CubeHandedOver); break;
    case InputKind::speech_text: ok = fsm::is_admissible(s, fsm::EventKind::HumanSpeechFinal); break;
    case InputKind::abort: ok = !fsm::is_terminal(s.phase); break;
    case InputKind::force_retry: ok = fsm::is_admissible(s, fsm::EventKind::Timeout); break;
    case InputKind::annotation: ok = s.trial_index > 0; break;
    default: break;
  }
  if (!ok) {
    throw InputRejected(Json(in.kind).get<std::string>() + " not admissible in " + fsm::to_string(s.phase) +
                        "/" + fsm::to_string(s.awaiting));
  }
  source_->push(std::move(in));
}

void SessionController::join() {
  std::thread t;
  {
    std::lock_guard lock(mu_);
    if (running_ || !worker_.joinable()) return;
    t = std::move(worker_);
  }
  t.join();
}

std::optional<RunResult> SessionController::wait() {
  std::thread t;
  {
    std::lock_guard lock(mu_);
    t = std::move(worker_);
  }
  if (t.joinable()) t.join();
  std::lock_guard lock(mu_);
  return last_;
}

void SessionController::stop() {
  {
    std::lock_guard lock(mu_);
    if (source_) source_->close();
  }
  wait();
}

namespace {

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_content(body.dump(), "application/json");
}

Json error_body(const std::string& msg) { return Json{{"error", msg}}; }

}  // namespace

Gateway::Gateway(SessionController& ctl) : ctl_(ctl), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.Get("/api/state", [this](const httplib::Request&, httplib::Response& res) { reply(res, 200, ctl_.state()); });

  s.Get("/api/graph", [](const httplib::Request&, httplib::Response& res) { reply(res, 200, fsm::graph_json()); });

  s.Get("/api/stream", [this](const httplib::Request& req, httplib::Response& res) {
    std::uint64_t after = ctl_.hub().last_id();
    if (req.has_header("Last-Event-ID")) {
      try {
        after = std::stoull(req.get_header_value("Last-Event-ID"));
      } catch (const std::exception&) {
      }
    }
    auto cursor = std::make_shared<std::uint64_t>(after);
    auto first = std::make_shared<bool>(true);
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, cursor, first](std::size_t, httplib::DataSink& sink) {
      if (*first) {
        *first = false;
        const auto msg = "event: state\ndata: " + ctl_.state().dump() + "\n\n";
        return sink.write(msg.data(), msg.size());
      }
      if (ctl_.hub().closed()) {
        sink.done();
        return false;
      }
      auto events = ctl_.hub().wait_after(*cursor, Millis(1000));
      if (events.empty()) {
        static const std::string ping = ": keepalive\n\n";
        return sink.write(ping.data(), ping.size());
      }
      for (const auto& [id, ev] : events) {
        *cursor = id;
        const auto msg = "id: " + std::to_string(id) + "\nevent: " + ev.value("type", "message") +
                         "\ndata: " + ev.dump() + "\n\n";
        if (!sink.write(msg.data(), msg.size())) return false;
      }
      return true;
    });
  });

  s.Post("/api/input", [this](const httplib::Request& req, httplib::Response& res) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const Json::exception& e) {
      return reply(res, 400, error_body(std::string("body is not JSON: ") + e.what()));
    }
    try {
      ctl_.submit(body);
      reply(res, 200, Json{{"accepted", true}, {"state", ctl_.state()}});
    } catch (const MalformedInput& e) {
      reply(res, 400, error_body(e.what()));
    } catch (const InputRejected& e) {
      reply(res, 409, error_body(e.what()));
    }
  });

  s.Post("/api/session/start", [this](const httplib::Request& req, httplib::Response& res) {
    Json overrides = Json::object();
    if (!req.body.empty()) {
      try {
        overrides = Json::parse(req.body);
      } catch (const Json::exception& e) {
        return reply(res, 400, error_body(std::string("body is not JSON: ") + e.what()));
      }
    }
    try {
      reply(res, 200, ctl_.start(overrides));
    } catch (const SessionBusy& e) {
      reply(res, 409, error_body(e.what()));
    } catch (const ConfigError& e) {
      reply(res, 400, error_body(e.what()));
    }
  });

  s.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
}

Gateway::~Gateway() { stop(); }

int Gateway::start(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw ModuleBootFailure("gateway cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void Gateway::stop() {
  ctl_.hub().close();
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::pair<std::string, int> parse_listen(const std::string& spec) {
  const auto colon = spec.rfind(':');
  std::string host = colon == std::string::npos ? "" : spec.substr(0, colon);
  const std::string port = colon == std::string::npos ? spec : spec.substr(colon + 1);
  if (host.empty()) host = "127.0.0.1";
  try {
    std::size_t used = 0;
    const int p = std::stoi(port, &used);
    if (used != port.size() || p < 0 || p > 65535) throw std::out_of_range(port);
    return {host, p};
  } catch (const std::exception&) {
    throw ConfigError("bad listen address " + spec);
  }
}

}  // namespace narravine::supervisor
