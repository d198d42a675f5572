#include "narravine/fsm/machine.hpp"

#include <random>

namespace narravine::fsm {

namespace {

Command cmd(CommandKind k, Json args = Json::object()) { return Command{k, std::move(args)}; }
Command speak(const std::string& text) { return cmd(CommandKind::speak, {{"text", text}}); }

Stage entry_stage(Phase p) {
  switch (p) {
    case Phase::Idle: return Stage::None;
    case Phase::Introduction: return Stage::Participant;
    case Phase::IcubTurnOpen: return Stage::Cube;
    case Phase::HumanTurn: return Stage::HumanSpeech;
    case Phase::IcubTurnClose: return Stage::Cube;
    case Phase::WrapUp: return Stage::Recap;
    case Phase::Closure: return Stage::None;
    case Phase::FailureRecovery: return Stage::Recovery;
  }
  return Stage::None;
}

std::set<EventKind> admissible_in(Phase phase, Stage stage) {
  using E = EventKind;
  switch (stage) {
    case Stage::None:
      return phase == Phase::Idle ? std::set<E>{E::StartSession} : std::set<E>{};
    case Stage::Participant: return {E::ParticipantRecognized, E::Timeout, E::ModuleFailure};
    case Stage::Cube: return {E::CubeHandedOver, E::Timeout, E::ModuleFailure};
    case Stage::Description: return {E::StickerDescribed, E::Timeout, E::ModuleFailure};
    case Stage::Snippet: return {E::StorySnippetReady, E::Timeout, E::ModuleFailure};
    case Stage::HumanSpeech: return {E::HumanSpeechFinal, E::Timeout, E::ModuleFailure};
    case Stage::Feedback: return {E::FeedbackDelivered, E::Timeout, E::ModuleFailure};
    case Stage::Recap: return {E::RecapDelivered, E::Timeout, E::ModuleFailure};
    case Stage::Recovery: return {E::RecoveryDone};
  }
  return {};
}

std::string slot_name(CubeSlot s) { return Json(s).get<std::string>(); }

std::string pick_feedback(const FsmConfig& cfg, int trial_index) {
  const auto& options = cfg.templates.feedback;
  if (options.empty()) return "Well done!";
  std::mt19937_64 rng(cfg.seed ^ (static_cast<std::uint64_t>(trial_index) * 0x9E3779B97F4A7C15ULL));
  return options[rng() % options.size()];
}

void begin_trial(StepResult& r, int index, const std::string& prompt) {
  auto& s = r.state;
  s.phase = Phase::IcubTurnOpen;
  s.awaiting = Stage::Cube;
  s.trial_index = index;
  s.retry_counts.clear();
  s.trial_cubes = {};
  s.trial_open = true;
  s.resume_phase.reset();
  r.commands = {speak(prompt), cmd(CommandKind::request_cube, {{"slot", "opening"}})};
}

void finish_session(StepResult& r, const FsmConfig& cfg) {
  r.state.phase = Phase::Closure;
  r.state.awaiting = Stage::None;
  r.state.trial_open = false;
  r.state.resume_phase.reset();
  r.commands = {cmd(CommandKind::greet, {{"text", cfg.templates.farewell}}),
                cmd(CommandKind::express_joy)};
}

// After a trial closes (recap delivered or recovery finished).
void advance(StepResult& r, const FsmConfig& cfg) {
  const auto& s = r.state;
  if (s.trial_index < s.trials_total) {
    begin_trial(r, s.trial_index + 1,
                s.trial_index == 0 ? cfg.templates.briefing : cfg.templates.next_trial);
  } else {
    finish_session(r, cfg);
  }
}

std::vector<Command> retry_commands(const SessionState& s, const FsmConfig& cfg) {
  const auto& t = cfg.templates;
  switch (s.awaiting) {
    case Stage::Participant: return {speak(t.participant_retry), cmd(CommandKind::detect_participant)};
    case Stage::Cube:
    case Stage::Description: {
      auto slot = slot_for(s.phase).value_or(CubeSlot::opening);
      return {speak(t.cube_retry), cmd(CommandKind::request_cube, {{"slot", slot_name(slot)}})};
    }
    case Stage::Snippet: {
      auto slot = slot_for(s.phase).value_or(CubeSlot::opening);
      auto idx = static_cast<std::size_t>(slot);
      return {cmd(CommandKind::call_llm,
                  {{"step", s.phase == Phase::IcubTurnClose ? "ending" : "opening"},
                   {"cube", s.trial_cubes[idx]}})};
    }
    case Stage::HumanSpeech: return {speak(t.reprompt), cmd(CommandKind::listen)};
    case Stage::Feedback:
      return {cmd(CommandKind::emit_feedback, {{"text", pick_feedback(cfg, s.trial_index)}})};
    case Stage::Recap: return {cmd(CommandKind::recap)};
    default: return {};
  }
}

void handle_failure(StepResult& r, const SessionState& s, const TransitionEvent& ev,
                    const FsmConfig& cfg) {
  auto kind = failure_kind_for(s.awaiting, ev);
  int used = 0;
  if (auto it = s.retry_counts.find(kind); it != s.retry_counts.end()) used = it->second;
  if (used < cfg.max_retries) {
    r.state.retry_counts[kind] = used + 1;
    r.commands = retry_commands(s, cfg);
    if (s.awaiting == Stage::Description) {
      r.state.awaiting = Stage::Cube;
      if (auto slot = slot_for(s.phase)) r.state.trial_cubes[static_cast<std::size_t>(*slot)].clear();
    }
    return;
  }
  // Retry budget spent: the trial is lost, the session skips to the next one.
  if (s.trial_open) r.closed_trial = ClosedTrial{s.trial_index, TrialOutcome::failed, kind};
  auto& n = r.state;
  n.phase = Phase::FailureRecovery;
  n.awaiting = Stage::Recovery;
  n.trial_open = false;
  n.resume_phase = s.trial_index < s.trials_total ? Phase::IcubTurnOpen : Phase::Closure;
  r.commands = {speak(cfg.templates.apology),
                cmd(CommandKind::recover, {{"resume_phase", *n.resume_phase}})};
}

std::optional<std::string> payload_text(const Json& payload, const char* key) {
  if (!payload.is_object() || !payload.contains(key) || !payload.at(key).is_string()) {
    return std::nullopt;
  }
  auto v = payload.at(key).get<std::string>();
  if (v.empty()) return std::nullopt;
  return v;
}

}  // namespace

bool is_terminal(Phase p) { return p == Phase::Idle || p == Phase::Closure; }

bool is_trial_phase(Phase p) {
  return p == Phase::IcubTurnOpen || p == Phase::HumanTurn || p == Phase::IcubTurnClose ||
         p == Phase::WrapUp;
}

std::optional<CubeSlot> slot_for(Phase p) {
  switch (p) {
    case Phase::IcubTurnOpen: return CubeSlot::opening;
    case Phase::HumanTurn: return CubeSlot::middle;
    case Phase::IcubTurnClose: return CubeSlot::ending;
    default: return std::nullopt;
  }
}

FailureKind failure_kind_for(Stage stage, const TransitionEvent& event) {
  if (event.kind == EventKind::ModuleFailure) {
    if (auto k = payload_text(event.payload, "failure_kind")) {
      if (auto parsed = parse_failure_kind(*k)) return *parsed;
    }
  }
  switch (stage) {
    case Stage::Cube: return FailureKind::cube_drop;
    case Stage::Description: return FailureKind::sticker_detection;
    case Stage::Snippet:
    case Stage::Recap: return FailureKind::llm_failure;
    case Stage::HumanSpeech: return FailureKind::voice_timeout;
    default: return FailureKind::other;
  }
}

SessionState initial_state(const FsmConfig& cfg, std::string participant_id) {
  SessionState s;
  s.trials_total = std::max(1, cfg.trials_total);
  s.participant_id = std::move(participant_id);
  return s;
}

std::set<EventKind> admissible(Phase phase) { return admissible_in(phase, entry_stage(phase)); }

std::set<EventKind> admissible(const SessionState& state) {
  return admissible_in(state.phase, state.awaiting);
}

bool is_admissible(const SessionState& state, EventKind kind) {
  return admissible(state).count(kind) > 0;
}

StepResult step(const SessionState& s, const TransitionEvent& ev, const FsmConfig& cfg) {
  StepResult r{s, {}, std::nullopt, std::nullopt};
  auto reject = [&](const std::string& why) {
    r.state = s;
    r.commands.clear();
    r.closed_trial.reset();
    r.rejection = "IllegalTransition: " + to_string(ev.kind) + " in " + to_string(s.phase) + "/" +
                  to_string(s.awaiting) + (why.empty() ? "" : " (" + why + ")");
    return r;
  };

  if (ev.kind == EventKind::OperatorAbort) {
    if (is_terminal(s.phase)) return reject("no session in progress");
    if (s.trial_open) r.closed_trial = ClosedTrial{s.trial_index, TrialOutcome::aborted, std::nullopt};
    r.state.phase = Phase::Closure;
    r.state.awaiting = Stage::None;
    r.state.trial_open = false;
    r.state.resume_phase.reset();
    return r;
  }
  if (!is_admissible(s, ev.kind)) return reject("");

  const auto& t = cfg.templates;
  auto& n = r.state;
  switch (ev.kind) {
    case EventKind::StartSession:
      n.phase = Phase::Introduction;
      n.awaiting = Stage::Participant;
      if (auto pid = payload_text(ev.payload, "participant_id")) n.participant_id = *pid;
      r.commands = {speak(t.welcome), cmd(CommandKind::detect_participant)};
      break;

    case EventKind::ParticipantRecognized:
      if (auto pid = payload_text(ev.payload, "participant_id")) n.participant_id = *pid;
      begin_trial(r, 1, t.briefing);
      break;

    case EventKind::CubeHandedOver: {
      auto cube = payload_text(ev.payload, "cube");
      if (!cube) return reject("payload lacks cube label");
      auto slot = *slot_for(s.phase);
      n.trial_cubes[static_cast<std::size_t>(slot)] = *cube;
      n.awaiting = Stage::Description;
      r.commands = {cmd(CommandKind::call_vlm, {{"cube", *cube}, {"slot", slot_name(slot)}})};
      break;
    }

    case EventKind::StickerDescribed: {
      auto slot = *slot_for(s.phase);
      const auto& cube = s.trial_cubes[static_cast<std::size_t>(slot)];
      if (slot == CubeSlot::middle) {
        n.awaiting = Stage::Feedback;
        r.commands = {cmd(CommandKind::emit_feedback, {{"text", pick_feedback(cfg, s.trial_index)}})};
      } else {
        n.awaiting = Stage::Snippet;
        r.commands = {cmd(CommandKind::call_llm,
                          {{"step", slot == CubeSlot::opening ? "opening" : "ending"},
                           {"cube", cube}})};
      }
      break;
    }

    case EventKind::StorySnippetReady: {
      auto text = payload_text(ev.payload, "text");
      auto step_name = payload_text(ev.payload, "step");
      auto expected = s.phase == Phase::IcubTurnOpen ? "opening" : "ending";
      if (!text) return reject("empty snippet");
      if (step_name && *step_name != expected) return reject("snippet step mismatch");
      if (s.phase == Phase::IcubTurnOpen) {
        n.phase = Phase::HumanTurn;
        n.awaiting = Stage::HumanSpeech;
        r.commands = {speak(*text), speak(t.invite_human), cmd(CommandKind::listen)};
      } else {
        n.phase = Phase::WrapUp;
        n.awaiting = Stage::Recap;
        r.commands = {speak(*text), cmd(CommandKind::recap)};
      }
      break;
    }

    case EventKind::HumanSpeechFinal:
      if (!payload_text(ev.payload, "text")) return reject("empty utterance");
      n.awaiting = Stage::Cube;
      r.commands = {speak(t.request_middle_cube),
                    cmd(CommandKind::request_cube, {{"slot", "middle"}})};
      break;

    case EventKind::FeedbackDelivered:
      n.phase = Phase::IcubTurnClose;
      n.awaiting = Stage::Cube;
      r.commands = {speak(t.request_final_cube), cmd(CommandKind::request_cube, {{"slot", "ending"}})};
      break;

    case EventKind::RecapDelivered:
      r.closed_trial = ClosedTrial{s.trial_index, TrialOutcome::success, std::nullopt};
      n.trial_open = false;
      advance(r, cfg);
      break;

    case EventKind::RecoveryDone:
      advance(r, cfg);
      break;

    case EventKind::Timeout:
    case EventKind::ModuleFailure:
      handle_failure(r, s, ev, cfg);
      break;

    case EventKind::OperatorAbort:
      break;
  }
  return r;
}

}  // namespace narravine::fsm
