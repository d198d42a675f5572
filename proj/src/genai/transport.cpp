#include "narravine/genai/transport.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "narravine/common/hash.hpp"

namespace narravine::genai {

void to_json(Json& j, const ChatMessage& m) { j = Json{{"role", m.role}, {"content", m.content}}; }

void to_json(Json& j, const ChatRequest& r) {
  j = Json{{"endpoint", r.endpoint}, {"model", r.model},       {"temperature", r.temperature},
           {"system", r.system},     {"messages", r.messages}, {"metadata", r.metadata}};
  if (r.image_path) j["image_path"] = *r.image_path;
}

MockOptions mock_options_from_json(const Json& j) {
  if (!j.is_object()) throw IoFailure("mock fixture must be an object");
  MockOptions o;
  try {
    o.mode = j.contains("responses") ? MockMode::canned : MockMode::echo;
    o.mode = j.value("mode", o.mode);
    o.seed = j.value("seed", o.seed);
    o.fail_first = j.value("fail_first", 0);
    o.lie_probability = j.value("lie_probability", 1.0);
    if (j.contains("descriptions")) o.descriptions = j["descriptions"].get<std::map<std::string, std::string>>();
    if (j.contains("down_endpoints")) o.down_endpoints = j["down_endpoints"].get<std::set<std::string>>();
    if (j.contains("responses")) {
      for (const auto& [endpoint, list] : j["responses"].items()) {
        for (const auto& item : list) o.canned[endpoint].push_back(item);
      }
    }
  } catch (const Json::exception& e) {
    throw IoFailure(std::string("malformed mock fixture: ") + e.what());
  }
  return o;
}

MockOptions load_mock_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot read mock fixture " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw IoFailure("mock fixture " + path + ": " + e.what());
  }
  return mock_options_from_json(j);
}

MockTransport::MockTransport(MockOptions opts, Clock* clock)
    : opts_(std::move(opts)), clock_(clock), rng_(opts_.seed) {}

int MockTransport::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

void MockTransport::set_down(bool down) {
  std::lock_guard lock(mu_);
  opts_.mode = down ? MockMode::down : MockMode::echo;
}

namespace {

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  while (!s.empty() && (s.back() == '.' || s.back() == ' ')) s.pop_back();
  return s;
}

std::string readable(std::string id) {
  std::replace(id.begin(), id.end(), '_', ' ');
  return id;
}

}  // namespace

std::string MockTransport::echo(const ChatRequest& req) {
  const Json& md = req.metadata;
  if (req.endpoint == "describer") {
    const std::string cube = md.value("cube", "");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (opts_.mode == MockMode::lie && unit(rng_) < opts_.lie_probability) {
      std::vector<std::string> others;
      for (const auto& [id, d] : opts_.descriptions) {
        if (id != cube) others.push_back(d);
      }
      if (others.empty()) return "A purple flying umbrella";
      return others[rng_() % others.size()];
    }
    auto it = opts_.descriptions.find(cube);
    return it != opts_.descriptions.end() ? it->second : "A friendly " + readable(cube);
  }
  if (req.endpoint == "recap") {
    std::ostringstream out;
    const auto terms = md.value("terms", std::vector<std::string>{});
    out << "Together we met";
    for (std::size_t i = 0; i < terms.size(); ++i) {
      out << (i == 0 ? " the " : i + 1 == terms.size() ? " and the " : ", the ") << terms[i];
    }
    out << '.';
    for (const auto& t : md.value("turns", std::vector<std::string>{})) out << ' ' << t;
    return out.str();
  }
  const std::string d = lower_first(md.value("description", std::string("a little friend")));
  if (md.value("step", "opening") == "ending") {
    static const char* endings[] = {"At last %s made everyone happy.", "Then %s joined, the end."};
    std::string f = endings[rng_() % 2];
    return f.replace(f.find("%s"), 2, d);
  }
  static const char* openings[] = {"Once upon a time there was %s.", "Long ago lived %s.",
                                   "One sunny day we met %s."};
  std::string f = openings[rng_() % 3];
  return f.replace(f.find("%s"), 2, d);
}

ChatResponse MockTransport::complete(const ChatRequest& req) {
  std::lock_guard lock(mu_);
  ++calls_;
  if (clock_) {
    clock_->sleep_for(Millis(req.endpoint == "describer" ? opts_.describer_latency_ms
                                                         : opts_.narrator_latency_ms));
  }
  if (opts_.mode == MockMode::down) throw TransportFailure("mock transport is down");
  if (opts_.down_endpoints.count(req.endpoint)) throw TransportFailure("mock " + req.endpoint + " is down");
  if (calls_ <= opts_.fail_first) throw TransportFailure("mock transport failing call " + std::to_string(calls_));
  if (opts_.mode == MockMode::canned) {
    auto& queue = opts_.canned[req.endpoint];
    if (!queue.empty()) {
      Json item = queue.front();
      queue.pop_front();
      if (item.is_object() && item.contains("error")) {
        throw TransportFailure("canned failure: " + item["error"].dump());
      }
      return ChatResponse{item.is_string() ? item.get<std::string>() : item.dump()};
    }
  }
  return ChatResponse{echo(req)};
}

HttpTransport::HttpTransport(HttpOptions opts) : opts_(std::move(opts)) {
  if (opts_.api_key.empty()) {
    if (const char* k = std::getenv("NARRAVINE_API_KEY")) opts_.api_key = k;
  }
}

Json HttpTransport::build_body(const ChatRequest& req) {
  Json messages = Json::array();
  messages.push_back({{"role", "system"}, {"content", req.system}});
  for (std::size_t i = 0; i < req.messages.size(); ++i) {
    const auto& m = req.messages[i];
    const bool last = i + 1 == req.messages.size();
    if (last && req.image_path) {
      std::ifstream in(*req.image_path, std::ios::binary);
      if (!in) throw TransportFailure("cannot read image " + *req.image_path);
      std::ostringstream bytes;
      bytes << in.rdbuf();
      Json content = Json::array();
      content.push_back({{"type", "text"}, {"text", m.content}});
      content.push_back({{"type", "image_url"},
                         {"image_url", {{"url", "data:image/png;base64," + base64_encode(bytes.str())}}}});
      messages.push_back({{"role", m.role}, {"content", content}});
    } else {
      messages.push_back({{"role", m.role}, {"content", m.content}});
    }
  }
  return Json{{"model", req.model}, {"temperature", req.temperature}, {"messages", messages}};
}

std::string HttpTransport::parse_reply(const std::string& body) {
  try {
    const auto j = Json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const Json::exception& e) {
    throw TransportFailure(std::string("unexpected chat reply: ") + e.what());
  }
}

ChatResponse HttpTransport::complete(const ChatRequest& req) {
  if (opts_.api_key.empty()) throw TransportFailure("NARRAVINE_API_KEY is not set");
  httplib::Client cli(opts_.base_url);
  const auto secs = std::max<std::int64_t>(1, req.deadline_ms / 1000);
  cli.set_connection_timeout(secs, 0);
  cli.set_read_timeout(secs, 0);
  cli.set_write_timeout(secs, 0);
  cli.set_bearer_token_auth(opts_.api_key);
  auto res = cli.Post(opts_.path, build_body(req).dump(), "application/json");
  if (!res) throw TransportFailure("chat request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw TransportFailure("chat request returned HTTP " + std::to_string(res->status));
  }
  return ChatResponse{parse_reply(res->body)};
}

RecordingTransport::RecordingTransport(Transport& inner, Sink sink, const Clock* clock)
    : inner_(inner), sink_(std::move(sink)), clock_(clock) {}

ChatResponse RecordingTransport::complete(const ChatRequest& req) {
  Json entry{{"ts", clock_ ? clock_->now_ms() : wall_clock_ms()},
             {"transport", inner_.name()},
             {"request", req}};
  try {
    auto res = inner_.complete(req);
    entry["response"] = res.text;
    sink_(entry);
    return res;
  } catch (const TransportFailure& e) {
    entry["error"] = e.what();
    sink_(entry);
    throw;
  }
}

}  // namespace narravine::genai
