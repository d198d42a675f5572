#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "narravine/common/json.hpp"

namespace narravine {

// Failure taxonomy reported per trial (wrong sticker detection, microphone
// not detecting voice, LLM crashing, cube dropped during handover).
enum class FailureKind { sticker_detection, voice_timeout, llm_failure, cube_drop, other };

enum class TrialOutcome { success, failed, aborted };

NLOHMANN_JSON_SERIALIZE_ENUM(FailureKind, {
                                              {FailureKind::sticker_detection, "sticker_detection"},
                                              {FailureKind::voice_timeout, "voice_timeout"},
                                              {FailureKind::llm_failure, "llm_failure"},
                                              {FailureKind::cube_drop, "cube_drop"},
                                              {FailureKind::other, "other"},
                                          })

NLOHMANN_JSON_SERIALIZE_ENUM(TrialOutcome, {
                                               {TrialOutcome::success, "success"},
                                               {TrialOutcome::failed, "failed"},
                                               {TrialOutcome::aborted, "aborted"},
                                           })

std::string_view to_string(FailureKind k);
std::string_view to_string(TrialOutcome o);
std::optional<FailureKind> parse_failure_kind(std::string_view s);

inline constexpr FailureKind kAllFailureKinds[] = {
    FailureKind::sticker_detection, FailureKind::voice_timeout, FailureKind::llm_failure,
    FailureKind::cube_drop, FailureKind::other};

}  // namespace narravine
