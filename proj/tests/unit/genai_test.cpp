#include <gtest/gtest.h>
#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "narravine/common/hash.hpp"
#include "narravine/common/text.hpp"
#include "narravine/genai/clients.hpp"

namespace narravine::genai {
namespace {

MockTransport canned(std::map<std::string, std::deque<Json>> responses, int fail_first = 0) {
  MockOptions o;
  o.mode = MockMode::canned;
  o.canned = std::move(responses);
  o.fail_first = fail_first;
  return MockTransport(o);
}

StoryTranscript full_story() {
  StoryTranscript t;
  t.turns = {{Speaker::robot, TurnKind::opening, "Once upon a time there was a green alien.", "alien", "A green alien"},
             {Speaker::human, TurnKind::human, "The alien found a golden key.", "key", "A shiny golden key"},
             {Speaker::robot, TurnKind::ending, "At last a tall castle made everyone happy.", "castle", "A tall castle"}};
  return t;
}

TEST(PromptTest, DeployedPromptsMatchReferenceHashes) {
  // Reference digests computed outside the code base from the published listings.
  EXPECT_EQ(sha256_hex(kDescriberPrompt), "9d7255d0be0d4d25b53d0cb624f1609fff5f798e9f4c16f4356e87799a9d927c");
  EXPECT_EQ(sha256_hex(kNarratorPrompt), "b1ae1248273658bbf317ee9845ed70c5fbac89a08e50d4c3f8a8e544969144a2");
  EXPECT_EQ(kDescriberPrompt.size(), 687u);
  EXPECT_EQ(kNarratorPrompt.size(), 578u);
  EXPECT_NE(kDescriberPrompt.find("using only 2 adjectiives"), std::string_view::npos);
  EXPECT_NE(kNarratorPrompt.find("developped"), std::string_view::npos);

  PromptConfig cfg;
  EXPECT_TRUE(prompts_verbatim(cfg));
  cfg.narrator_system_prompt += " ";
  auto f = prompt_fidelity(cfg);
  EXPECT_TRUE(f["describer"]["verbatim"].get<bool>());
  EXPECT_FALSE(f["narrator"]["verbatim"].get<bool>());
}

TEST(PromptTest, ConfigDefaultsAndJson) {
  PromptConfig cfg;
  EXPECT_EQ(cfg.model_name, "gpt-4o");
  EXPECT_EQ(cfg.describer_temperature, 0.0);
  EXPECT_EQ(cfg.narrator_temperature, 0.7);
  auto back = Json::parse(R"({"max_retries": 3, "vlm_input": "image"})").get<PromptConfig>();
  EXPECT_EQ(back.max_retries, 3);
  EXPECT_EQ(back.vlm_input, VlmInput::image);
  EXPECT_EQ(back.describer_system_prompt, kDescriberPrompt);
}

TEST(DescribeTest, KoalaAcceptedFirstTime) {
  auto t = canned({{"describer", {"A grey smiling koala"}}});
  Diagnostics d;
  auto desc = describe_sticker({"koala"}, PromptConfig{}, t, &d);
  EXPECT_EQ(desc.text, "A grey smiling koala");
  EXPECT_EQ(desc.word_count, 4);
  EXPECT_EQ(desc.source_cube, "koala");
  EXPECT_EQ(d.attempts, 1);
  EXPECT_TRUE(d.warnings.empty());
}

TEST(DescribeTest, LongAnswerRetriedThenTruncated) {
  const std::string fifteen =
      "A very large grey koala with a tiny hat sits happily on a tree today";
  ASSERT_EQ(text::count_words(fifteen), 15);
  auto t = canned({{"describer", {fifteen, fifteen}}});
  Diagnostics d;
  auto desc = describe_sticker({"koala"}, PromptConfig{}, t, &d);
  EXPECT_EQ(d.attempts, 2);
  EXPECT_EQ(desc.word_count, 10);
  EXPECT_EQ(desc.text, "A very large grey koala with a tiny hat sits");
  ASSERT_EQ(d.warnings.size(), 1u);
}

TEST(DescribeTest, RetryCanRecover) {
  auto t = canned({{"describer", {"A sticker of a grey koala", "A grey smiling koala"}}});
  Diagnostics d;
  EXPECT_EQ(describe_sticker({"koala"}, PromptConfig{}, t, &d).text, "A grey smiling koala");
  EXPECT_EQ(d.attempts, 2);
  EXPECT_TRUE(d.warnings.empty());
}

TEST(DescribeTest, TransportDownFailsAfterRetries) {
  MockOptions o;
  o.mode = MockMode::down;
  MockTransport t(o);
  PromptConfig cfg;
  cfg.max_retries = 2;
  EXPECT_THROW(describe_sticker({"koala"}, cfg, t), TransportFailure);
  EXPECT_EQ(t.calls(), 3);
}

TEST(DescribeTest, TransientFailureRecovers) {
  auto t = canned({{"describer", {"A grey smiling koala"}}}, 1);
  EXPECT_EQ(describe_sticker({"koala"}, PromptConfig{}, t).text, "A grey smiling koala");
}

TEST(DescribeTest, LatencyComesFromTheClock) {
  ManualClock clock;
  MockOptions o;
  o.descriptions["alien"] = "A green smiling alien";
  MockTransport t(o, &clock);
  auto d = describe_sticker({"alien"}, PromptConfig{}, t, nullptr, &clock);
  EXPECT_EQ(d.text, "A green smiling alien");
  EXPECT_EQ(d.latency_ms, 800);
}

TEST(DescribeTest, LyingMockNamesAnotherSticker) {
  MockOptions o;
  o.mode = MockMode::lie;
  o.descriptions = {{"alien", "A green smiling alien"}, {"koala", "A grey smiling koala"}};
  MockTransport t(o);
  EXPECT_EQ(describe_sticker({"alien"}, PromptConfig{}, t).text, "A grey smiling koala");
}

TEST(SnippetTest, OpeningReferencesTheScenario) {
  MockTransport t(MockOptions{});
  StickerDescription desc{"a mushroom house with red roof", 6, "mushroom_house", 0};
  auto s = generate_snippet({}, SnippetStep::opening, desc, PromptConfig{}, t);
  EXPECT_TRUE(text::contains_word(s.text, "house")) << s.text;
  EXPECT_LE(s.word_count, 15);
  EXPECT_EQ(s.step, SnippetStep::opening);
}

TEST(SnippetTest, ContextRulesAreEnforced) {
  MockTransport t(MockOptions{});
  StickerDescription desc{"a key", 2, "key", 0};
  StoryTranscript only_opening;
  only_opening.turns.push_back(full_story().turns[0]);
  EXPECT_THROW(generate_snippet(only_opening, SnippetStep::ending, desc, PromptConfig{}, t), ContextViolation);
  EXPECT_THROW(generate_snippet(only_opening, SnippetStep::opening, desc, PromptConfig{}, t), ContextViolation);
  EXPECT_THROW(generate_snippet({}, SnippetStep::recap, desc, PromptConfig{}, t), ContextViolation);
  auto two = full_story();
  two.turns.pop_back();
  auto s = generate_snippet(two, SnippetStep::ending, desc, PromptConfig{}, t);
  EXPECT_EQ(s.step, SnippetStep::ending);
  EXPECT_EQ(t.calls(), 1);
}

TEST(SnippetTest, ForbiddenWordRetriedThenRejected) {
  auto t = canned({{"narrator", {"The sticker shows a dragon.", "A cartoon dragon flew away."}}});
  Diagnostics d;
  auto s = generate_snippet({}, SnippetStep::opening, {"a dragon", 2, "dragon", 0}, PromptConfig{}, t, 1, &d);
  EXPECT_EQ(d.attempts, 2);
  ASSERT_EQ(d.warnings.size(), 1u);
  EXPECT_FALSE(text::contains_any_word(s.text, forbidden_narration_words()));
  EXPECT_EQ(s.text, "A dragon flew away.");
}

// Whatever the model says, nothing leaving the clients breaks the limits.
TEST(SnippetTest, PropertyConstraintClosure) {
  std::mt19937_64 rng(8);
  const std::vector<std::string> vocab{"the", "little", "sticker", "dragon", "cartoon", "flew", "home,",
                                       "cardbox", "and", "smiled", "--", "Stickers!"};
  auto junk = [&] {
    std::string s;
    const int n = static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) s += vocab[rng() % vocab.size()] + " ";
    return s;
  };
  for (int i = 0; i < 300; ++i) {
    auto t = canned({{"describer", {junk(), junk()}}, {"narrator", {junk(), junk()}}});
    auto d = describe_sticker({"dragon"}, PromptConfig{}, t);
    ASSERT_LE(d.word_count, 10);
    ASSERT_GE(d.word_count, 1);
    ASSERT_EQ(d.word_count, text::count_words(d.text));
    ASSERT_FALSE(text::contains_word(d.text, "sticker")) << d.text;
    auto s = generate_snippet({}, SnippetStep::opening, d, PromptConfig{}, t);
    ASSERT_LE(s.word_count, 15);
    ASSERT_FALSE(text::contains_any_word(s.text, forbidden_narration_words())) << s.text;
  }
}

TEST(RecapTest, EchoMockCoversAllCubes) {
  MockTransport t(MockOptions{});
  Diagnostics d;
  auto r = generate_recap(full_story(), {"alien", "key", "castle"}, PromptConfig{}, t, 2, &d);
  EXPECT_EQ(r.step, SnippetStep::recap);
  EXPECT_EQ(r.trial_index, 2);
  for (const char* term : {"alien", "key", "castle"}) EXPECT_TRUE(text::contains_word(r.text, term));
  EXPECT_TRUE(d.warnings.empty());
}

TEST(RecapTest, IncompleteTranscriptsAreRefused) {
  MockTransport t(MockOptions{});
  auto two = full_story();
  two.turns.pop_back();
  EXPECT_THROW(generate_recap(two, {}, PromptConfig{}, t), IncompleteTranscript);
  EXPECT_THROW(generate_recap({}, {}, PromptConfig{}, t), IncompleteTranscript);
  EXPECT_EQ(t.calls(), 0);
}

TEST(RecapTest, MissingCoverageIsLogged) {
  auto t = canned({{"recap", {"A nice story.", "Another nice story."}}});
  Diagnostics d;
  auto r = generate_recap(full_story(), {"alien", "key", "castle"}, PromptConfig{}, t, 1, &d);
  EXPECT_EQ(d.attempts, 2);
  ASSERT_EQ(d.warnings.size(), 1u);
  EXPECT_EQ(r.text, "Another nice story.");
}

TEST(MockTest, SameSeedSameTranscript) {
  auto run = [] {
    MockOptions o;
    o.seed = 5;
    MockTransport t(o);
    std::vector<std::string> out;
    for (const char* id : {"alien", "koala", "castle", "key"}) {
      auto d = describe_sticker({id}, PromptConfig{}, t);
      out.push_back(generate_snippet({}, SnippetStep::opening, d, PromptConfig{}, t).text);
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(MockTest, FixtureFileLoads) {
  auto path = std::filesystem::temp_directory_path() / "narravine_mock_fixture.json";
  std::ofstream(path) << R"({"seed": 3, "responses": {"describer": ["A red balloon", {"error": "503"}]}})";
  auto o = load_mock_fixture(path.string());
  EXPECT_EQ(o.mode, MockMode::canned);
  EXPECT_EQ(o.seed, 3u);
  MockTransport t(o);
  ChatRequest req;
  req.endpoint = "describer";
  EXPECT_EQ(t.complete(req).text, "A red balloon");
  EXPECT_THROW(t.complete(req), TransportFailure);
  std::filesystem::remove(path);
  EXPECT_THROW(load_mock_fixture(path.string()), IoFailure);
}

TEST(RecordingTest, LogsRequestAndOutcome) {
  MockOptions o;
  o.fail_first = 1;
  MockTransport inner(o);
  std::vector<Json> log;
  RecordingTransport t(inner, [&](const Json& j) { log.push_back(j); });
  EXPECT_NO_THROW(describe_sticker({"koala"}, PromptConfig{}, t));
  ASSERT_EQ(log.size(), 2u);
  EXPECT_TRUE(log[0].contains("error"));
  EXPECT_EQ(log[1]["request"]["system"], std::string(kDescriberPrompt));
  EXPECT_EQ(log[1]["response"], "A friendly koala");
}

TEST(HttpTest, BodyCarriesSystemPromptAndImage) {
  auto img = std::filesystem::temp_directory_path() / "narravine_pixel.png";
  std::ofstream(img, std::ios::binary) << "hello";
  ChatRequest req;
  req.model = "gpt-4o";
  req.system = "sys";
  req.messages = {{"user", "What is inside the sticker?"}};
  req.image_path = img.string();
  auto body = HttpTransport::build_body(req);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][1]["content"][1]["image_url"]["url"], "data:image/png;base64,aGVsbG8=");
  std::filesystem::remove(img);
  EXPECT_THROW(HttpTransport::parse_reply("{}"), TransportFailure);
}

TEST(HttpTest, TalksToALocalChatService) {
  httplib::Server srv;
  std::string auth;
  srv.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    auto body = Json::parse(req.body);
    Json reply{{"choices", {{{"message", {{"role", "assistant"}, {"content", "A grey smiling koala"}}}}}}};
    res.set_content(body["temperature"] == 0.0 ? reply.dump() : "{}", "application/json");
  });
  const int port = srv.bind_to_any_port("127.0.0.1");
  std::thread th([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();

  HttpTransport t({"http://127.0.0.1:" + std::to_string(port), "/v1/chat/completions", "k123"});
  auto d = describe_sticker({"koala"}, PromptConfig{}, t);
  EXPECT_EQ(d.text, "A grey smiling koala");
  EXPECT_EQ(auth, "Bearer k123");

  HttpTransport wrong({"http://127.0.0.1:" + std::to_string(port), "/nope", "k"});
  EXPECT_THROW(describe_sticker({"koala"}, PromptConfig{}, wrong), TransportFailure);
  srv.stop();
  th.join();
}

}  // namespace
}  // namespace narravine::genai
