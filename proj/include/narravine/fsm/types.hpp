#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "narravine/common/json.hpp"
#include "narravine/common/kinds.hpp"

namespace narravine::fsm {

enum class Phase {
  Idle,
  Introduction,
  IcubTurnOpen,
  HumanTurn,
  IcubTurnClose,
  WrapUp,
  Closure,
  FailureRecovery,
};

// What the supervisor is waiting for inside the current phase.
enum class Stage { None, Participant, Cube, Description, Snippet, HumanSpeech, Feedback, Recap, Recovery };

enum class EventKind {
  StartSession,
  ParticipantRecognized,
  CubeHandedOver,
  StickerDescribed,
  StorySnippetReady,
  HumanSpeechFinal,
  FeedbackDelivered,
  RecapDelivered,
  Timeout,
  ModuleFailure,
  RecoveryDone,
  // Operator override; accepted in every non-terminal phase and therefore
  // not part of the admissibility table.
  OperatorAbort,
};

enum class CommandKind {
  speak,
  detect_participant,
  request_cube,
  call_vlm,
  call_llm,
  listen,
  emit_feedback,
  recap,
  greet,
  express_joy,
  recover,
};

// Cube position inside one story.
enum class CubeSlot { opening = 0, middle = 1, ending = 2 };

NLOHMANN_JSON_SERIALIZE_ENUM(Phase, {{Phase::Idle, "Idle"},
                                     {Phase::Introduction, "Introduction"},
                                     {Phase::IcubTurnOpen, "IcubTurnOpen"},
                                     {Phase::HumanTurn, "HumanTurn"},
                                     {Phase::IcubTurnClose, "IcubTurnClose"},
                                     {Phase::WrapUp, "WrapUp"},
                                     {Phase::Closure, "Closure"},
                                     {Phase::FailureRecovery, "FailureRecovery"}})

NLOHMANN_JSON_SERIALIZE_ENUM(Stage, {{Stage::None, "None"},
                                     {Stage::Participant, "Participant"},
                                     {Stage::Cube, "Cube"},
                                     {Stage::Description, "Description"},
                                     {Stage::Snippet, "Snippet"},
                                     {Stage::HumanSpeech, "HumanSpeech"},
                                     {Stage::Feedback, "Feedback"},
                                     {Stage::Recap, "Recap"},
                                     {Stage::Recovery, "Recovery"}})

NLOHMANN_JSON_SERIALIZE_ENUM(EventKind, {{EventKind::StartSession, "StartSession"},
                                         {EventKind::ParticipantRecognized, "ParticipantRecognized"},
                                         {EventKind::CubeHandedOver, "CubeHandedOver"},
                                         {EventKind::StickerDescribed, "StickerDescribed"},
                                         {EventKind::StorySnippetReady, "StorySnippetReady"},
                                         {EventKind::HumanSpeechFinal, "HumanSpeechFinal"},
                                         {EventKind::FeedbackDelivered, "FeedbackDelivered"},
                                         {EventKind::RecapDelivered, "RecapDelivered"},
                                         {EventKind::Timeout, "Timeout"},
                                         {EventKind::ModuleFailure, "ModuleFailure"},
                                         {EventKind::RecoveryDone, "RecoveryDone"},
                                         {EventKind::OperatorAbort, "OperatorAbort"}})

NLOHMANN_JSON_SERIALIZE_ENUM(CommandKind, {{CommandKind::speak, "speak"},
                                           {CommandKind::detect_participant, "detect_participant"},
                                           {CommandKind::request_cube, "request_cube"},
                                           {CommandKind::call_vlm, "call_vlm"},
                                           {CommandKind::call_llm, "call_llm"},
                                           {CommandKind::listen, "listen"},
                                           {CommandKind::emit_feedback, "emit_feedback"},
                                           {CommandKind::recap, "recap"},
                                           {CommandKind::greet, "greet"},
                                           {CommandKind::express_joy, "express_joy"},
                                           {CommandKind::recover, "recover"}})

NLOHMANN_JSON_SERIALIZE_ENUM(CubeSlot, {{CubeSlot::opening, "opening"},
                                        {CubeSlot::middle, "middle"},
                                        {CubeSlot::ending, "ending"}})

std::string to_string(Phase p);
std::string to_string(Stage s);
std::string to_string(EventKind k);
std::string to_string(CommandKind k);

struct TransitionEvent {
  EventKind kind = EventKind::StartSession;
  Json payload = Json::object();
  std::int64_t received_at = 0;

  bool operator==(const TransitionEvent&) const = default;
};

void to_json(Json& j, const TransitionEvent& e);
void from_json(const Json& j, TransitionEvent& e);

struct Command {
  CommandKind kind = CommandKind::speak;
  Json args = Json::object();

  bool operator==(const Command&) const = default;
};

void to_json(Json& j, const Command& c);

struct SessionState {
  Phase phase = Phase::Idle;
  Stage awaiting = Stage::None;
  int trial_index = 0;  // 1-based once the first trial starts
  int trials_total = 3;
  std::string participant_id;
  std::map<FailureKind, int> retry_counts;
  std::optional<Phase> resume_phase;  // set while in FailureRecovery
  std::array<std::string, 3> trial_cubes;  // detected label per slot
  bool trial_open = false;

  bool operator==(const SessionState&) const = default;
};

void to_json(Json& j, const SessionState& s);
void from_json(const Json& j, SessionState& s);

}  // namespace narravine::fsm
