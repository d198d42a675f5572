#include "narravine/fsm/log.hpp"

#include <sstream>

namespace narravine::fsm {

Json event_line(const TransitionEvent& ev, const SessionState& before) {
  return Json{{"type", "event"},
              {"ts", ev.received_at},
              {"event", ev},
              {"phase", before.phase},
              {"awaiting", before.awaiting},
              {"trial_index", before.trial_index}};
}

Json transition_line(std::int64_t ts, const SessionState& before, const StepResult& result,
                     EventKind kind) {
  Json j{{"type", "transition"},
         {"ts", ts},
         {"phase_from", before.phase},
         {"phase_to", result.state.phase},
         {"event_kind", kind},
         {"trial_index", result.state.trial_index},
         {"stage_from", before.awaiting},
         {"stage_to", result.state.awaiting},
         {"accepted", result.accepted()}};
  if (result.rejection) j["rejection"] = *result.rejection;
  if (result.closed_trial) {
    j["closed_trial"] = {{"trial_index", result.closed_trial->trial_index},
                         {"outcome", result.closed_trial->outcome}};
    if (result.closed_trial->failure_kind) {
      j["closed_trial"]["failure_kind"] = *result.closed_trial->failure_kind;
    }
  }
  return j;
}

LogReplay replay_log(std::span<const Json> lines, const FsmConfig& cfg, SessionState initial) {
  LogReplay out{{}, std::move(initial)};
  for (const auto& line : lines) {
    if (line.value("type", "") != "event") continue;
    auto ev = line.at("event").get<TransitionEvent>();
    auto before = out.final_state;
    auto r = step(before, ev, cfg);
    out.transitions.push_back(transition_line(ev.received_at, before, r, ev.kind));
    out.final_state = r.state;
  }
  return out;
}

std::vector<GraphEdge> protocol_graph() {
  using P = Phase;
  using E = EventKind;
  std::vector<GraphEdge> g{
      {P::Idle, P::Introduction, E::StartSession, ""},
      {P::Introduction, P::IcubTurnOpen, E::ParticipantRecognized, ""},
      {P::IcubTurnOpen, P::HumanTurn, E::StorySnippetReady, "opening snippet"},
      {P::HumanTurn, P::IcubTurnClose, E::FeedbackDelivered, ""},
      {P::IcubTurnClose, P::WrapUp, E::StorySnippetReady, "ending snippet"},
      {P::WrapUp, P::IcubTurnOpen, E::RecapDelivered, "trial_index < trials_total"},
      {P::WrapUp, P::Closure, E::RecapDelivered, "trial_index == trials_total"},
      {P::FailureRecovery, P::IcubTurnOpen, E::RecoveryDone, "trial_index < trials_total"},
      {P::FailureRecovery, P::Closure, E::RecoveryDone, "trial_index == trials_total"},
  };
  for (auto p : {P::Introduction, P::IcubTurnOpen, P::HumanTurn, P::IcubTurnClose, P::WrapUp}) {
    g.push_back({p, P::FailureRecovery, E::Timeout, "retries exhausted"});
    g.push_back({p, P::FailureRecovery, E::ModuleFailure, "retries exhausted"});
  }
  for (auto p : {P::Introduction, P::IcubTurnOpen, P::HumanTurn, P::IcubTurnClose, P::WrapUp,
                 P::FailureRecovery}) {
    g.push_back({p, P::Closure, E::OperatorAbort, "operator"});
  }
  return g;
}

Json graph_json() {
  Json nodes = Json::array();
  for (auto p : {Phase::Idle, Phase::Introduction, Phase::IcubTurnOpen, Phase::HumanTurn,
                 Phase::IcubTurnClose, Phase::WrapUp, Phase::Closure, Phase::FailureRecovery}) {
    Json adm = Json::array();
    for (auto k : admissible(p)) adm.push_back(k);
    nodes.push_back({{"id", p}, {"admissible", adm}});
  }
  Json edges = Json::array();
  for (const auto& e : protocol_graph()) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"event", e.event}, {"guard", e.guard}});
  }
  return Json{{"nodes", nodes}, {"edges", edges}};
}

std::string graph_dot() {
  std::ostringstream os;
  os << "digraph protocol {\n  rankdir=LR;\n";
  for (const auto& e : protocol_graph()) {
    os << "  " << to_string(e.from) << " -> " << to_string(e.to) << " [label=\""
       << to_string(e.event);
    if (!e.guard.empty()) os << "\\n[" << e.guard << "]";
    os << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace narravine::fsm
