#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "narravine/common/json.hpp"
#include "narravine/fsm/machine.hpp"

namespace narravine::fsm {

// Line-delimited session log. Each processed event produces an "event" line
// (written before the state changes) followed by a "transition" line:
//   {"type":"transition","ts","phase_from","phase_to","event_kind","trial_index",...}
Json event_line(const TransitionEvent& ev, const SessionState& before);
Json transition_line(std::int64_t ts, const SessionState& before, const StepResult& result,
                     EventKind kind);

struct LogReplay {
  std::vector<Json> transitions;
  SessionState final_state;
};

// Re-runs every logged event through step() from `initial`.
LogReplay replay_log(std::span<const Json> lines, const FsmConfig& cfg, SessionState initial);

// Static description of the protocol graph for the console to render.
struct GraphEdge {
  Phase from;
  Phase to;
  EventKind event;
  std::string guard;
};

std::vector<GraphEdge> protocol_graph();
Json graph_json();
std::string graph_dot();

}  // namespace narravine::fsm
