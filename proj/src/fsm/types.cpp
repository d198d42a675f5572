#include "narravine/fsm/types.hpp"

#include "narravine/fsm/config.hpp"

namespace narravine::fsm {

namespace {

// The JSON tables are the single source of names.
template <typename E>
std::string enum_name(E e) {
  return Json(e).template get<std::string>();
}

}  // namespace

std::string to_string(Phase p) { return enum_name(p); }
std::string to_string(Stage s) { return enum_name(s); }
std::string to_string(EventKind k) { return enum_name(k); }
std::string to_string(CommandKind k) { return enum_name(k); }

void to_json(Json& j, const TransitionEvent& e) {
  j = Json{{"kind", e.kind}, {"payload", e.payload}, {"received_at", e.received_at}};
}

void from_json(const Json& j, TransitionEvent& e) {
  j.at("kind").get_to(e.kind);
  e.payload = j.value("payload", Json::object());
  e.received_at = j.value("received_at", std::int64_t{0});
}

void to_json(Json& j, const Command& c) { j = Json{{"kind", c.kind}, {"args", c.args}}; }

void to_json(Json& j, const SessionState& s) {
  Json retries = Json::object();
  for (const auto& [k, n] : s.retry_counts) retries[std::string(narravine::to_string(k))] = n;
  j = Json{{"phase", s.phase},
           {"awaiting", s.awaiting},
           {"trial_index", s.trial_index},
           {"trials_total", s.trials_total},
           {"participant_id", s.participant_id},
           {"retry_counts", retries},
           {"resume_phase", s.resume_phase ? Json(*s.resume_phase) : Json(nullptr)},
           {"trial_cubes", s.trial_cubes},
           {"trial_open", s.trial_open}};
}

void from_json(const Json& j, SessionState& s) {
  j.at("phase").get_to(s.phase);
  j.at("awaiting").get_to(s.awaiting);
  j.at("trial_index").get_to(s.trial_index);
  j.at("trials_total").get_to(s.trials_total);
  s.participant_id = j.value("participant_id", "");
  s.retry_counts.clear();
  const Json retries = j.value("retry_counts", Json::object());
  for (const auto& [k, n] : retries.items()) {
    if (auto kind = parse_failure_kind(k)) s.retry_counts[*kind] = n.get<int>();
  }
  const auto& rp = j.at("resume_phase");
  s.resume_phase = rp.is_null() ? std::nullopt : std::optional<Phase>(rp.get<Phase>());
  j.at("trial_cubes").get_to(s.trial_cubes);
  s.trial_open = j.value("trial_open", false);
}

void from_json(const Json& j, SpeechTemplates& t) {
  SpeechTemplates d;
  t.welcome = j.value("welcome", d.welcome);
  t.participant_retry = j.value("participant_retry", d.participant_retry);
  t.briefing = j.value("briefing", d.briefing);
  t.next_trial = j.value("next_trial", d.next_trial);
  t.invite_human = j.value("invite_human", d.invite_human);
  t.request_middle_cube = j.value("request_middle_cube", d.request_middle_cube);
  t.request_final_cube = j.value("request_final_cube", d.request_final_cube);
  t.reprompt = j.value("reprompt", d.reprompt);
  t.cube_retry = j.value("cube_retry", d.cube_retry);
  t.apology = j.value("apology", d.apology);
  t.farewell = j.value("farewell", d.farewell);
  t.feedback = j.value("feedback", d.feedback);
}

void to_json(Json& j, const SpeechTemplates& t) {
  j = Json{{"welcome", t.welcome},
           {"participant_retry", t.participant_retry},
           {"briefing", t.briefing},
           {"next_trial", t.next_trial},
           {"invite_human", t.invite_human},
           {"request_middle_cube", t.request_middle_cube},
           {"request_final_cube", t.request_final_cube},
           {"reprompt", t.reprompt},
           {"cube_retry", t.cube_retry},
           {"apology", t.apology},
           {"farewell", t.farewell},
           {"feedback", t.feedback}};
}

}  // namespace narravine::fsm
