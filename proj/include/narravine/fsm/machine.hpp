#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "narravine/fsm/config.hpp"
#include "narravine/fsm/types.hpp"

namespace narravine::fsm {

struct ClosedTrial {
  int trial_index = 0;
  TrialOutcome outcome = TrialOutcome::success;
  std::optional<FailureKind> failure_kind;

  bool operator==(const ClosedTrial&) const = default;
};

struct StepResult {
  SessionState state;
  std::vector<Command> commands;
  std::optional<ClosedTrial> closed_trial;
  // Set when the event was not admissible; state is then unchanged.
  std::optional<std::string> rejection;

  bool accepted() const { return !rejection.has_value(); }
};

SessionState initial_state(const FsmConfig& cfg, std::string participant_id = {});

// Pure transition function: the successor state and the side effects to run.
StepResult step(const SessionState& state, const TransitionEvent& event, const FsmConfig& cfg);

// Events accepted on entry to `phase` (the stage the phase starts in).
std::set<EventKind> admissible(Phase phase);
// Events accepted right now, given the stage the state is waiting in.
std::set<EventKind> admissible(const SessionState& state);
bool is_admissible(const SessionState& state, EventKind kind);

bool is_terminal(Phase p);
bool is_trial_phase(Phase p);
std::optional<CubeSlot> slot_for(Phase p);

// Failure kind charged for a Timeout/ModuleFailure while waiting in `stage`.
FailureKind failure_kind_for(Stage stage, const TransitionEvent& event);

}  // namespace narravine::fsm
