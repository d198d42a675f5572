#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "narravine/genai/clients.hpp"
#include "narravine/store/session_dir.hpp"

namespace narravine::store {
namespace {

namespace fs = std::filesystem;

StickerManifest manifest() { return StickerManifest::load(std::string(NARRAVINE_DATA_DIR) + "/stickers.json"); }

TrialRecord success_record(int k) {
  TrialRecord r;
  r.trial_index = k;
  r.cube_sequence = {"castle", "koala", "key"};
  r.vlm_descriptions = {{"A tall grey castle", 4, "castle", 700}, {"A grey smiling koala", 4, "koala", 650},
                        {"A shiny golden key", 4, "key", 710}};
  r.transcript.turns = {{Speaker::robot, TurnKind::opening, "Once there was a castle.", "castle", "A tall grey castle"},
                        {Speaker::human, TurnKind::human, "A koala lived there.", "koala", "A grey smiling koala"},
                        {Speaker::robot, TurnKind::ending, "It found a key.", "key", "A shiny golden key"},
                        {Speaker::robot, TurnKind::recap, "Castle, koala, key.", "", ""}};
  return r;
}

fs::path temp_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("narravine_store_" + name);
  fs::remove_all(p);
  return p;
}

TEST(MetricsTest, TwentyTwoOfTwentyFive) {
  std::vector<TrialRecord> rs;
  for (int k = 1; k <= 25; ++k) {
    auto r = success_record(k);
    if (k > 22) {
      r.outcome = TrialOutcome::failed;
      r.failure_kind = k == 23 ? FailureKind::sticker_detection : FailureKind::voice_timeout;
    }
    rs.push_back(r);
  }
  auto m = compute_metrics(rs, manifest());
  EXPECT_DOUBLE_EQ(m.success_rate, 0.88);
  EXPECT_EQ(m.failure_counts[FailureKind::voice_timeout], 2);
  EXPECT_EQ(m.failure_counts[FailureKind::sticker_detection], 1);
  EXPECT_DOUBLE_EQ(m.vlm_agreement, 1.0);
  EXPECT_EQ(m.llm_addition_rate, 0.0);
  EXPECT_EQ(m.llm_fix_rate, 0.0);
}

TEST(MetricsTest, EmptyInputThrows) { EXPECT_THROW(compute_metrics({}), EmptyInput); }

TEST(MetricsTest, AgreementUsesHeadNoun) {
  auto man = manifest();
  EXPECT_TRUE(description_agrees({"A mushroom house with red roof", 6, "mushroom_house", 0}, man));
  EXPECT_FALSE(description_agrees({"A red mushroom", 3, "mushroom_house", 0}, man));
  EXPECT_TRUE(description_agrees({"Two grey koalas", 3, "koala", 0}, man));
  EXPECT_FALSE(description_agrees({"A grey smiling koala", 4, "alien", 0}, man));
}

// Honest mock echoes the manifest, lying mock always names another sticker.
TEST(MetricsTest, AgreementOracleWithMocks) {
  auto man = manifest();
  genai::MockOptions honest;
  for (const auto& e : man.entries()) honest.descriptions[e.id] = e.description;
  auto liar = honest;
  liar.mode = genai::MockMode::lie;
  for (auto* opts : {&honest, &liar}) {
    genai::MockTransport t(*opts);
    std::mt19937_64 rng(3);
    std::vector<TrialRecord> rs;
    for (int k = 1; k <= 10; ++k) {
      TrialRecord r;
      r.trial_index = k;
      for (int c = 0; c < 3; ++c) {
        const auto id = man.ids()[rng() % 9];
        r.cube_sequence.push_back(id);
        r.vlm_descriptions.push_back(genai::describe_sticker({id}, {}, t));
      }
      rs.push_back(r);
    }
    EXPECT_DOUBLE_EQ(compute_metrics(rs, man).vlm_agreement, opts == &honest ? 1.0 : 0.0);
  }
}

TEST(MetricsTest, PropertyRandomSetsMatchCountOracle) {
  auto man = manifest();
  const auto ids = man.ids();
  std::mt19937_64 rng(77);
  for (int set = 0; set < 200; ++set) {
    const int n = 1 + static_cast<int>(rng() % 40);
    std::vector<TrialRecord> rs;
    int succ = 0, failed = 0, descs = 0, agree = 0, add = 0, fix = 0;
    for (int k = 1; k <= n; ++k) {
      TrialRecord r;
      r.trial_index = k;
      const int roll = static_cast<int>(rng() % 10);
      r.outcome = roll < 7 ? TrialOutcome::success : roll < 9 ? TrialOutcome::failed : TrialOutcome::aborted;
      const int cubes = r.outcome == TrialOutcome::success ? 3 : static_cast<int>(rng() % 4);
      for (int c = 0; c < cubes; ++c) {
        const auto& id = ids[rng() % ids.size()];
        r.cube_sequence.push_back(id);
        const bool right = rng() % 5 != 0;
        const auto& said = right ? id : ids[(std::find(ids.begin(), ids.end(), id) - ids.begin() + 1) % ids.size()];
        r.vlm_descriptions.push_back({man.find(said)->description, 4, id, 0});
        ++descs;
        agree += right;
      }
      if (r.outcome == TrialOutcome::failed) {
        r.failure_kind = kAllFailureKinds[rng() % 5];
        ++failed;
      }
      succ += r.outcome == TrialOutcome::success;
      r.annotations = {rng() % 3 == 0, rng() % 7 == 0};
      add += r.annotations.llm_added_elements;
      fix += r.annotations.llm_fixed_human;
      rs.push_back(r);
    }
    auto m = compute_metrics(rs, man);
    ASSERT_DOUBLE_EQ(m.success_rate, static_cast<double>(succ) / n);
    ASSERT_DOUBLE_EQ(m.vlm_agreement, descs ? static_cast<double>(agree) / descs : 0.0);
    ASSERT_DOUBLE_EQ(m.llm_addition_rate, static_cast<double>(add) / n);
    ASSERT_DOUBLE_EQ(m.llm_fix_rate, static_cast<double>(fix) / n);
    int total = 0;
    for (const auto& [k, c] : m.failure_counts) total += c;
    ASSERT_EQ(total, failed);
    const double scaled = m.success_rate * n;
    ASSERT_NEAR(scaled, std::round(scaled), 1e-9);
    for (double rate : {m.success_rate, m.vlm_agreement, m.llm_addition_rate, m.llm_fix_rate}) {
      ASSERT_GE(rate, 0.0);
      ASSERT_LE(rate, 1.0);
    }
  }
}

TEST(PersistTest, RoundTrip) {
  auto dir = temp_dir("roundtrip");
  SessionDir sd(dir);
  auto r = success_record(2);
  r.annotations.llm_added_elements = true;
  auto p = sd.persist(r);
  EXPECT_EQ(p.filename(), "trial_2.rec");
  EXPECT_EQ(load_record(p), r);

  TrialRecord failed;
  failed.trial_index = 10;
  failed.cube_sequence = {"alien"};
  failed.outcome = TrialOutcome::failed;
  failed.failure_kind = FailureKind::cube_drop;
  sd.persist(failed);
  auto all = load_records(dir);
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].trial_index, 2);
  EXPECT_EQ(all[1], failed);
  EXPECT_EQ(compute_metrics(all), compute_metrics({r, failed}));
  fs::remove_all(dir);
}

TEST(PersistTest, UnwritableDirectory) {
  auto base = temp_dir("blocker");
  fs::create_directories(base);
  std::ofstream(base / "file") << "x";
  EXPECT_THROW(SessionDir(base / "file" / "session"), IoFailure);
  EXPECT_THROW(persist(success_record(1), base / "file"), IoFailure);
  EXPECT_THROW(load_records(base / "missing"), IoFailure);
  fs::remove_all(base);
}

TEST(PersistTest, InvalidRecordsRejected) {
  auto r = success_record(1);
  r.outcome = TrialOutcome::failed;
  EXPECT_THROW(validate(r), PreconditionViolation);
  auto s = success_record(1);
  s.cube_sequence.pop_back();
  EXPECT_THROW(validate(s), PreconditionViolation);
}

TEST(PersistTest, LogsAreLineDelimited) {
  auto dir = temp_dir("logs");
  SessionDir sd(dir);
  sd.write_meta({{"participant", "p01"}});
  for (int i = 0; i < 3; ++i) sd.append_fsm({{"i", i}});
  sd.append_genai({{"endpoint", "describer"}});
  sd.append_transcript({{"text", "hello"}});
  EXPECT_EQ(read_meta(dir)["participant"], "p01");
  auto lines = read_lines(dir / kFsmLog);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[2]["i"], 2);
  EXPECT_EQ(read_lines(dir / kGenAiLog).size(), 1u);
  EXPECT_EQ(read_lines(dir / kTranscriptFile).size(), 1u);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace narravine::store
