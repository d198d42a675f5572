#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "narravine/common/clock.hpp"
#include "narravine/common/error.hpp"
#include "narravine/common/json.hpp"

namespace narravine::genai {

class TransportFailure : public Error {
 public:
  using Error::Error;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

// endpoint is one of "describer", "narrator", "recap".
struct ChatRequest {
  std::string endpoint;
  std::string model;
  double temperature = 0.0;
  std::string system;
  std::vector<ChatMessage> messages;
  std::optional<std::string> image_path;
  std::int64_t deadline_ms = 30000;
  // Structured context the mock uses in place of language understanding.
  Json metadata = Json::object();
};

struct ChatResponse {
  std::string text;
};

void to_json(Json& j, const ChatMessage& m);
void to_json(Json& j, const ChatRequest& r);

class Transport {
 public:
  virtual ~Transport() = default;
  // Throws TransportFailure.
  virtual ChatResponse complete(const ChatRequest& req) = 0;
  virtual std::string name() const = 0;
};

enum class MockMode { echo, canned, down, lie };

NLOHMANN_JSON_SERIALIZE_ENUM(MockMode, {{MockMode::echo, "echo"},
                                        {MockMode::canned, "canned"},
                                        {MockMode::down, "down"},
                                        {MockMode::lie, "lie"}})

struct MockOptions {
  MockMode mode = MockMode::echo;
  std::uint64_t seed = 42;
  int fail_first = 0;
  // lie mode: chance that the describer names a different sticker
  double lie_probability = 1.0;
  // sticker id -> ground-truth description used by the echo describer
  std::map<std::string, std::string> descriptions;
  // endpoint -> ordered responses; a {"error": "..."} entry fails that call
  std::map<std::string, std::deque<Json>> canned;
  // endpoints that always fail, whatever the mode
  std::set<std::string> down_endpoints;
  std::int64_t describer_latency_ms = 800;
  std::int64_t narrator_latency_ms = 1200;
};

// Reads {"mode", "seed", "fail_first", "lie_probability", "down_endpoints",
// "responses": {endpoint: [...]}}.
MockOptions load_mock_fixture(const std::string& path);
MockOptions mock_options_from_json(const Json& j);

// Deterministic stand-in for the chat service. Simulated latency is spent
// on the supplied clock.
class MockTransport final : public Transport {
 public:
  explicit MockTransport(MockOptions opts, Clock* clock = nullptr);

  ChatResponse complete(const ChatRequest& req) override;
  std::string name() const override { return "mock"; }

  int calls() const;
  void set_down(bool down);

 private:
  std::string echo(const ChatRequest& req);

  mutable std::mutex mu_;
  MockOptions opts_;
  Clock* clock_;
  std::mt19937_64 rng_;
  int calls_ = 0;
};

struct HttpOptions {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string api_key;  // empty: read NARRAVINE_API_KEY
};

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(HttpOptions opts = {});

  ChatResponse complete(const ChatRequest& req) override;
  std::string name() const override { return "http"; }

  static Json build_body(const ChatRequest& req);
  static std::string parse_reply(const std::string& body);

 private:
  HttpOptions opts_;
};

// Logs every request/response pair verbatim, then forwards.
class RecordingTransport final : public Transport {
 public:
  using Sink = std::function<void(const Json&)>;
  RecordingTransport(Transport& inner, Sink sink, const Clock* clock = nullptr);

  ChatResponse complete(const ChatRequest& req) override;
  std::string name() const override { return inner_.name(); }

 private:
  Transport& inner_;
  Sink sink_;
  const Clock* clock_;
};

}  // namespace narravine::genai
