#include "narravine/common/kinds.hpp"

namespace narravine {

std::string_view to_string(FailureKind k) {
  switch (k) {
    case FailureKind::sticker_detection: return "sticker_detection";
    case FailureKind::voice_timeout: return "voice_timeout";
    case FailureKind::llm_failure: return "llm_failure";
    case FailureKind::cube_drop: return "cube_drop";
    case FailureKind::other: return "other";
  }
  return "other";
}

std::string_view to_string(TrialOutcome o) {
  switch (o) {
    case TrialOutcome::success: return "success";
    case TrialOutcome::failed: return "failed";
    case TrialOutcome::aborted: return "aborted";
  }
  return "failed";
}

std::optional<FailureKind> parse_failure_kind(std::string_view s) {
  for (auto k : kAllFailureKinds) {
    if (to_string(k) == s) return k;
  }
  if (s == "sticker detection") return FailureKind::sticker_detection;
  return std::nullopt;
}

}  // namespace narravine
