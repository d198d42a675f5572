#include "narravine/store/record.hpp"

#include "narravine/common/text.hpp"

namespace narravine::store {

void validate(const TrialRecord& r) {
  if (r.trial_index < 1) throw PreconditionViolation("trial_index starts at 1");
  if (r.outcome == TrialOutcome::failed && !r.failure_kind) {
    throw PreconditionViolation("failed trial without failure kind");
  }
  if (r.outcome == TrialOutcome::success && r.cube_sequence.size() != 3) {
    throw PreconditionViolation("completed trial needs three cubes");
  }
  if (r.cube_sequence.size() > 3) throw PreconditionViolation("more than three cubes in a trial");
}

void to_json(Json& j, const Annotations& a) {
  j = Json{{"llm_added_elements", a.llm_added_elements}, {"llm_fixed_human", a.llm_fixed_human}};
}

void from_json(const Json& j, Annotations& a) {
  a.llm_added_elements = j.value("llm_added_elements", false);
  a.llm_fixed_human = j.value("llm_fixed_human", false);
}

void to_json(Json& j, const TrialRecord& r) {
  j = Json{{"trial_index", r.trial_index},
           {"cube_sequence", r.cube_sequence},
           {"vlm_descriptions", r.vlm_descriptions},
           {"transcript", r.transcript},
           {"outcome", r.outcome},
           {"failure_kind", r.failure_kind ? Json(*r.failure_kind) : Json(nullptr)},
           {"annotations", r.annotations}};
}

void from_json(const Json& j, TrialRecord& r) {
  j.at("trial_index").get_to(r.trial_index);
  j.at("cube_sequence").get_to(r.cube_sequence);
  j.at("vlm_descriptions").get_to(r.vlm_descriptions);
  j.at("transcript").get_to(r.transcript);
  j.at("outcome").get_to(r.outcome);
  const auto& fk = j.at("failure_kind");
  r.failure_kind = fk.is_null() ? std::nullopt : std::optional<FailureKind>(fk.get<FailureKind>());
  r.annotations = j.value("annotations", Annotations{});
}

void to_json(Json& j, const SessionMetrics& m) {
  Json counts = Json::object();
  for (auto k : kAllFailureKinds) {
    auto it = m.failure_counts.find(k);
    counts[std::string(to_string(k))] = it == m.failure_counts.end() ? 0 : it->second;
  }
  j = Json{{"records", m.records},
           {"successes", m.successes},
           {"descriptions", m.descriptions},
           {"agreeing", m.agreeing},
           {"additions", m.additions},
           {"fixes", m.fixes},
           {"success_rate", m.success_rate},
           {"vlm_agreement", m.vlm_agreement},
           {"llm_addition_rate", m.llm_addition_rate},
           {"llm_fix_rate", m.llm_fix_rate},
           {"failure_counts", counts}};
}

bool description_agrees(const StickerDescription& d, const StickerManifest& manifest) {
  return text::contains_word(d.text, manifest.head_noun(d.source_cube));
}

SessionMetrics compute_metrics(const std::vector<TrialRecord>& records, const StickerManifest& manifest) {
  if (records.empty()) throw EmptyInput("no trial records");
  SessionMetrics m;
  m.records = static_cast<int>(records.size());
  for (const auto& r : records) {
    if (r.outcome == TrialOutcome::success) ++m.successes;
    if (r.outcome == TrialOutcome::failed) ++m.failure_counts[r.failure_kind.value_or(FailureKind::other)];
    for (const auto& d : r.vlm_descriptions) {
      ++m.descriptions;
      if (description_agrees(d, manifest)) ++m.agreeing;
    }
    if (r.annotations.llm_added_elements) ++m.additions;
    if (r.annotations.llm_fixed_human) ++m.fixes;
  }
  const double n = m.records;
  m.success_rate = m.successes / n;
  m.vlm_agreement = m.descriptions ? static_cast<double>(m.agreeing) / m.descriptions : 0.0;
  m.llm_addition_rate = m.additions / n;
  m.llm_fix_rate = m.fixes / n;
  return m;
}

}  // namespace narravine::store
