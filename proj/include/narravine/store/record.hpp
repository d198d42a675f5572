#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "narravine/common/error.hpp"
#include "narravine/common/json.hpp"
#include "narravine/common/kinds.hpp"
#include "narravine/common/stickers.hpp"
#include "narravine/common/story.hpp"

namespace narravine::store {

using narravine::EmptyInput;

// Operator annotations entered from the console.
struct Annotations {
  bool llm_added_elements = false;
  bool llm_fixed_human = false;

  bool operator==(const Annotations&) const = default;
};

struct TrialRecord {
  int trial_index = 0;
  std::vector<std::string> cube_sequence;  // ground truth, in handover order
  std::vector<StickerDescription> vlm_descriptions;
  StoryTranscript transcript;
  TrialOutcome outcome = TrialOutcome::success;
  std::optional<FailureKind> failure_kind;
  Annotations annotations;

  bool operator==(const TrialRecord&) const = default;
};

// Throws PreconditionViolation when the record breaks its invariants.
void validate(const TrialRecord& r);

void to_json(Json& j, const Annotations& a);
void from_json(const Json& j, Annotations& a);
void to_json(Json& j, const TrialRecord& r);
void from_json(const Json& j, TrialRecord& r);

struct SessionMetrics {
  int records = 0;
  int successes = 0;
  int descriptions = 0;
  int agreeing = 0;
  int additions = 0;
  int fixes = 0;
  double success_rate = 0;
  double vlm_agreement = 0;
  double llm_addition_rate = 0;
  double llm_fix_rate = 0;
  std::map<FailureKind, int> failure_counts;

  bool operator==(const SessionMetrics&) const = default;
};

void to_json(Json& j, const SessionMetrics& m);

// A description agrees when it names the sticker's head noun.
bool description_agrees(const StickerDescription& d, const StickerManifest& manifest);

// Agreement is per cube, addition and fix rates per trial.
SessionMetrics compute_metrics(const std::vector<TrialRecord>& records,
                               const StickerManifest& manifest = {});

}  // namespace narravine::store
