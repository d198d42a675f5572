#include <gtest/gtest.h>

#include <random>

#include "narravine/fsm/log.hpp"
#include "narravine/fsm/machine.hpp"

namespace narravine::fsm {
namespace {

TransitionEvent ev(EventKind k, Json payload = Json::object()) {
  return TransitionEvent{k, std::move(payload), 0};
}

SessionState at(Phase p, Stage s, int trial = 1, int total = 3) {
  SessionState st;
  st.phase = p;
  st.awaiting = s;
  st.trial_index = trial;
  st.trials_total = total;
  st.trial_open = is_trial_phase(p);
  return st;
}

std::vector<CommandKind> kinds(const std::vector<Command>& cmds) {
  std::vector<CommandKind> out;
  for (const auto& c : cmds) out.push_back(c.kind);
  return out;
}

class FsmTest : public ::testing::Test {
 protected:
  FsmConfig cfg;
};

TEST_F(FsmTest, StartSessionIsTheOnlyWayOutOfIdle) {
  auto s = initial_state(cfg);
  EXPECT_EQ(admissible(Phase::Idle), std::set<EventKind>{EventKind::StartSession});
  auto bad = step(s, ev(EventKind::ParticipantRecognized), cfg);
  EXPECT_FALSE(bad.accepted());
  EXPECT_EQ(bad.state, s);
  auto r = step(s, ev(EventKind::StartSession), cfg);
  EXPECT_EQ(r.state.phase, Phase::Introduction);
  EXPECT_EQ(kinds(r.commands), (std::vector{CommandKind::speak, CommandKind::detect_participant}));
}

TEST_F(FsmTest, ParticipantRecognizedOpensFirstTrial) {
  auto r = step(at(Phase::Introduction, Stage::Participant, 0), ev(EventKind::ParticipantRecognized),
                cfg);
  ASSERT_TRUE(r.accepted());
  EXPECT_EQ(r.state.phase, Phase::IcubTurnOpen);
  EXPECT_EQ(r.state.trial_index, 1);
  ASSERT_EQ(kinds(r.commands), (std::vector{CommandKind::speak, CommandKind::request_cube}));
  EXPECT_EQ(r.commands[0].args["text"], cfg.templates.briefing);
}

TEST_F(FsmTest, RecapLoopsToNextTrial) {
  auto r = step(at(Phase::WrapUp, Stage::Recap, 1), ev(EventKind::RecapDelivered, {{"text", "x"}}),
                cfg);
  EXPECT_EQ(r.state.phase, Phase::IcubTurnOpen);
  EXPECT_EQ(r.state.trial_index, 2);
  ASSERT_TRUE(r.closed_trial);
  EXPECT_EQ(r.closed_trial->outcome, TrialOutcome::success);
  EXPECT_EQ(r.closed_trial->trial_index, 1);
}

TEST_F(FsmTest, LastRecapClosesWithGreetingAndJoy) {
  auto r = step(at(Phase::WrapUp, Stage::Recap, 3), ev(EventKind::RecapDelivered), cfg);
  EXPECT_EQ(r.state.phase, Phase::Closure);
  EXPECT_EQ(kinds(r.commands), (std::vector{CommandKind::greet, CommandKind::express_joy}));
  EXPECT_TRUE(admissible(r.state).empty());
}

TEST_F(FsmTest, SpeechTimeoutRepromptsWhileBudgetLasts) {
  auto s = at(Phase::HumanTurn, Stage::HumanSpeech);
  auto r = step(s, ev(EventKind::Timeout), cfg);
  EXPECT_EQ(r.state.phase, Phase::HumanTurn);
  ASSERT_EQ(kinds(r.commands), (std::vector{CommandKind::speak, CommandKind::listen}));
  EXPECT_EQ(r.commands[0].args["text"], cfg.templates.reprompt);
  EXPECT_EQ(r.state.retry_counts.at(FailureKind::voice_timeout), 1);
}

TEST_F(FsmTest, ExhaustedRetriesLandInFailureRecovery) {
  auto s = at(Phase::HumanTurn, Stage::HumanSpeech, 2);
  s.retry_counts[FailureKind::voice_timeout] = cfg.max_retries;
  auto r = step(s, ev(EventKind::Timeout), cfg);
  EXPECT_EQ(r.state.phase, Phase::FailureRecovery);
  ASSERT_TRUE(r.state.resume_phase);
  EXPECT_EQ(*r.state.resume_phase, Phase::IcubTurnOpen);
  ASSERT_TRUE(r.closed_trial);
  EXPECT_EQ(r.closed_trial->outcome, TrialOutcome::failed);
  EXPECT_EQ(r.closed_trial->failure_kind, FailureKind::voice_timeout);
  EXPECT_EQ(admissible(r.state), std::set<EventKind>{EventKind::RecoveryDone});

  auto resumed = step(r.state, ev(EventKind::RecoveryDone), cfg);
  EXPECT_EQ(resumed.state.phase, Phase::IcubTurnOpen);
  EXPECT_EQ(resumed.state.trial_index, 3);
  EXPECT_TRUE(resumed.state.retry_counts.empty());
}

TEST_F(FsmTest, FailureOnLastTrialResumesIntoClosure) {
  auto s = at(Phase::WrapUp, Stage::Recap, 3);
  s.retry_counts[FailureKind::llm_failure] = cfg.max_retries;
  auto r = step(s, ev(EventKind::ModuleFailure, {{"failure_kind", "llm_failure"}}), cfg);
  EXPECT_EQ(*r.state.resume_phase, Phase::Closure);
  auto done = step(r.state, ev(EventKind::RecoveryDone), cfg);
  EXPECT_EQ(done.state.phase, Phase::Closure);
}

TEST_F(FsmTest, DescriptionFailureReRequestsTheCube) {
  auto s = at(Phase::IcubTurnOpen, Stage::Description);
  s.trial_cubes[0] = "alien";
  auto r = step(s, ev(EventKind::ModuleFailure, {{"failure_kind", "sticker_detection"}}), cfg);
  EXPECT_EQ(r.state.awaiting, Stage::Cube);
  EXPECT_TRUE(r.state.trial_cubes[0].empty());
  EXPECT_EQ(kinds(r.commands), (std::vector{CommandKind::speak, CommandKind::request_cube}));
}

TEST_F(FsmTest, AdmissibilityTable) {
  EXPECT_TRUE(admissible(Phase::Closure).empty());
  EXPECT_EQ(admissible(Phase::IcubTurnOpen),
            (std::set{EventKind::CubeHandedOver, EventKind::Timeout, EventKind::ModuleFailure}));
  EXPECT_FALSE(admissible(Phase::Idle).count(EventKind::ParticipantRecognized));
}

TEST_F(FsmTest, CubeHandoverDrivesDescriberThenNarrator) {
  auto s = at(Phase::IcubTurnOpen, Stage::Cube);
  auto r1 = step(s, ev(EventKind::CubeHandedOver, {{"cube", "alien"}}), cfg);
  ASSERT_EQ(kinds(r1.commands), std::vector{CommandKind::call_vlm});
  EXPECT_EQ(r1.commands[0].args["cube"], "alien");
  auto r2 = step(r1.state, ev(EventKind::StickerDescribed, {{"text", "A green alien"}}), cfg);
  ASSERT_EQ(kinds(r2.commands), std::vector{CommandKind::call_llm});
  EXPECT_EQ(r2.commands[0].args["step"], "opening");
  auto r3 = step(r2.state, ev(EventKind::StorySnippetReady, {{"text", "Once..."}, {"step", "opening"}}),
                 cfg);
  EXPECT_EQ(r3.state.phase, Phase::HumanTurn);
  EXPECT_EQ(kinds(r3.commands),
            (std::vector{CommandKind::speak, CommandKind::speak, CommandKind::listen}));
}

TEST_F(FsmTest, MalformedPayloadsAreRejected) {
  auto s = at(Phase::IcubTurnOpen, Stage::Cube);
  EXPECT_FALSE(step(s, ev(EventKind::CubeHandedOver), cfg).accepted());
  auto snip = at(Phase::IcubTurnOpen, Stage::Snippet);
  EXPECT_FALSE(step(snip, ev(EventKind::StorySnippetReady, {{"text", "x"}, {"step", "ending"}}), cfg)
                   .accepted());
}

TEST_F(FsmTest, AbortClosesOpenTrialAsAborted) {
  auto r = step(at(Phase::HumanTurn, Stage::HumanSpeech, 2), ev(EventKind::OperatorAbort), cfg);
  EXPECT_EQ(r.state.phase, Phase::Closure);
  ASSERT_TRUE(r.closed_trial);
  EXPECT_EQ(r.closed_trial->outcome, TrialOutcome::aborted);
  EXPECT_FALSE(step(initial_state(cfg), ev(EventKind::OperatorAbort), cfg).accepted());
}

TEST_F(FsmTest, FeedbackChoiceIsDeterministic) {
  auto s = at(Phase::HumanTurn, Stage::Description);
  auto a = step(s, ev(EventKind::StickerDescribed, {{"text", "t"}}), cfg);
  auto b = step(s, ev(EventKind::StickerDescribed, {{"text", "t"}}), cfg);
  ASSERT_EQ(kinds(a.commands), std::vector{CommandKind::emit_feedback});
  EXPECT_EQ(a.commands, b.commands);
  EXPECT_EQ(a.state, b.state);
}

// Random walks over admissible events (plus the odd inadmissible one).
struct Walker {
  std::mt19937_64 rng;
  FsmConfig cfg;

  TransitionEvent next(const SessionState& s) {
    static const std::vector<std::string> cubes{"alien", "castle", "koala", "key"};
    auto adm = admissible(s);
    std::vector<EventKind> pool(adm.begin(), adm.end());
    if (pool.empty() || rng() % 20 == 0) {
      pool = {EventKind::CubeHandedOver, EventKind::HumanSpeechFinal, EventKind::RecapDelivered,
              EventKind::ParticipantRecognized};
    }
    if (rng() % 200 == 0) pool = {EventKind::OperatorAbort};
    auto k = pool[rng() % pool.size()];
    Json p = Json::object();
    switch (k) {
      case EventKind::CubeHandedOver: p["cube"] = cubes[rng() % cubes.size()]; break;
      case EventKind::StickerDescribed: p["text"] = "a thing"; break;
      case EventKind::StorySnippetReady:
        p["text"] = "and so on";
        p["step"] = s.phase == Phase::IcubTurnClose ? "ending" : "opening";
        break;
      case EventKind::HumanSpeechFinal: p["text"] = "my part"; break;
      case EventKind::ModuleFailure:
        p["failure_kind"] = std::string(to_string(kAllFailureKinds[rng() % 5]));
        break;
      default: break;
    }
    return TransitionEvent{k, p, 0};
  }
};

int rank(Phase p) {
  switch (p) {
    case Phase::IcubTurnOpen: return 1;
    case Phase::HumanTurn: return 2;
    case Phase::IcubTurnClose: return 3;
    case Phase::WrapUp: return 4;
    default: return 0;
  }
}

TEST_F(FsmTest, PropertyRandomWalksRespectProtocolInvariants) {
  std::set<std::tuple<Phase, Phase, EventKind>> graph;
  for (const auto& e : protocol_graph()) graph.insert({e.from, e.to, e.event});

  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Walker w{std::mt19937_64(seed), cfg};
    w.cfg.trials_total = 1 + static_cast<int>(seed % 5);
    auto s = initial_state(w.cfg);
    int last_rank = 0;
    int trial = 0;
    for (int i = 0; i < 400 && s.phase != Phase::Closure; ++i) {
      auto e = w.next(s);
      auto r = step(s, e, w.cfg);
      // determinism
      auto again = step(s, e, w.cfg);
      ASSERT_EQ(again.state, r.state);
      ASSERT_EQ(again.commands, r.commands);
      if (!r.accepted()) {
        ASSERT_EQ(r.state, s);
        ASSERT_TRUE(r.commands.empty());
        continue;
      }
      const auto& n = r.state;
      ASSERT_LE(n.trial_index, n.trials_total);
      for (const auto& [kind, used] : n.retry_counts) ASSERT_LE(used, w.cfg.max_retries);
      if (n.phase == Phase::FailureRecovery) ASSERT_TRUE(n.resume_phase.has_value());
      if (n.phase != s.phase) {
        ASSERT_TRUE(graph.count({s.phase, n.phase, e.kind}))
            << to_string(s.phase) << " -> " << to_string(n.phase) << " on " << to_string(e.kind);
      }
      if (n.trial_index != trial) {
        trial = n.trial_index;
        last_rank = 0;
      }
      if (is_trial_phase(n.phase)) {
        ASSERT_GE(rank(n.phase), last_rank) << "phase order violated in trial " << trial;
        last_rank = rank(n.phase);
      }
      s = n;
    }
  }
}

TEST_F(FsmTest, LogReplayReproducesTransitions) {
  Walker w{std::mt19937_64(99), cfg};
  auto s = initial_state(cfg);
  std::vector<Json> log;
  for (int i = 0; i < 200 && s.phase != Phase::Closure; ++i) {
    auto e = w.next(s);
    e.received_at = i * 10;
    log.push_back(event_line(e, s));
    auto r = step(s, e, cfg);
    log.push_back(transition_line(e.received_at, s, r, e.kind));
    s = r.state;
  }
  auto replay = replay_log(log, cfg, initial_state(cfg));
  std::vector<Json> logged;
  for (const auto& l : log) {
    if (l["type"] == "transition") logged.push_back(l);
  }
  EXPECT_EQ(replay.transitions, logged);
  EXPECT_EQ(replay.final_state, s);
}

TEST_F(FsmTest, GraphExportsAllPhases) {
  auto g = graph_json();
  EXPECT_EQ(g["nodes"].size(), 8u);
  EXPECT_NE(graph_dot().find("WrapUp -> Closure"), std::string::npos);
}

TEST_F(FsmTest, StateJsonRoundTrip) {
  auto s = at(Phase::FailureRecovery, Stage::Recovery, 2);
  s.retry_counts[FailureKind::cube_drop] = 2;
  s.resume_phase = Phase::IcubTurnOpen;
  s.trial_cubes = {"alien", "", ""};
  EXPECT_EQ(Json(s).get<SessionState>(), s);
}

}  // namespace
}  // namespace narravine::fsm
