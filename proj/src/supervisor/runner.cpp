#include "narravine/supervisor/runner.hpp"

#include <filesystem>

#include <spdlog/spdlog.h>

#include "narravine/common/paths.hpp"
#include "narravine/perception/errors.hpp"

namespace narravine::supervisor {

using fsm::EventKind;
using fsm::Stage;

namespace {

std::size_t slot_index(fsm::Phase p) {
  return static_cast<std::size_t>(fsm::slot_for(p).value_or(fsm::CubeSlot::opening));
}

Json failure(FailureKind k, const std::string& reason) {
  return Json{{"failure_kind", k}, {"reason", reason}};
}

}  // namespace

std::unique_ptr<genai::Transport> make_transport(const SessionConfig& c, Clock& clock,
                                                 const Json& scene_mock) {
  if (c.genai_transport == "live") {
    genai::HttpOptions h;
    h.base_url = c.genai_base_url;
    return std::make_unique<genai::HttpTransport>(h);
  }
  genai::MockOptions o;
  try {
    if (scene_mock.is_object() && !scene_mock.empty()) {
      o = genai::mock_options_from_json(scene_mock);
    } else if (!c.genai_fixture.empty()) {
      o = genai::load_mock_fixture(c.genai_fixture);
    }
  } catch (const IoFailure& e) {
    throw ConfigError(e.what());
  }
  if (o.descriptions.empty()) {
    const auto manifest = StickerManifest::load(c.manifest_path());
    for (const auto& e : manifest.entries()) {
      o.descriptions[e.id] = e.description;
    }
  }
  return std::make_unique<genai::MockTransport>(o, &clock);
}

Supervisor::Supervisor(SessionConfig cfg, Clock& clock, genai::Transport& transport, portnet::Bus* bus)
    : cfg_(std::move(cfg)),
      fsm_cfg_(fsm_config(cfg_)),
      prompts_(prompt_config(cfg_)),
      clock_(clock),
      raw_transport_(transport),
      bus_(bus),
      rng_(cfg_.seed) {
  if (!cfg_.output_dir.empty()) dir_ = std::make_unique<store::SessionDir>(cfg_.output_dir);
  transport_ = std::make_unique<genai::RecordingTransport>(
      raw_transport_,
      [this](const Json& line) {
        if (dir_) dir_->append_genai(line);
      },
      &clock_);
  try {
    manifest_ = StickerManifest::load(cfg_.manifest_path());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot load sticker manifest: ") + e.what());
  }
  perception::register_manifest(registry_, manifest_);
  detector_ = std::make_unique<perception::ObjectDetector>(
      registry_, perception::DetectorOptions{cfg_.perception.misdetection_probability,
                                             cfg_.perception.noise_level, cfg_.perception.seed});
  if (bus_) {
    try {
      node_ = std::make_unique<perception::PerceptionNode>(*bus_, cfg_.port_base);
    } catch (const std::exception& e) {
      throw ModuleBootFailure(std::string("perception ports: ") + e.what());
    }
  }
  speech_ = std::make_unique<speech::ConsoleSpeech>(clock_, [this](const speech::Utterance& u) {
    Json line = u;
    line["trial_index"] = state_.trial_index;
    if (dir_) dir_->append_transcript(line);
    line["type"] = "utterance";
    notify(line);
  });
  state_ = fsm::initial_state(fsm_cfg_, cfg_.participant_id);
  if (dir_) {
    dir_->write_meta({{"config", cfg_},
                      {"prompts", genai::prompt_fidelity(prompts_)},
                      {"transport", raw_transport_.name()},
                      {"started_at", clock_.now_ms()}});
  }
}

Supervisor::~Supervisor() = default;

fsm::SessionState Supervisor::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

Json Supervisor::state_json() const {
  std::lock_guard lock(mu_);
  Json j = state_;
  Json adm = Json::array();
  for (auto k : fsm::admissible(state_)) adm.push_back(k);
  j["admissible"] = adm;
  j["records"] = result_.records.size();
  return j;
}

void Supervisor::notify(const Json& ev) {
  if (observer_) observer_(ev);
}

void Supervisor::log_fsm(const Json& line) {
  if (dir_) dir_->append_fsm(line);
}

void Supervisor::enqueue(EventKind kind, Json payload) {
  pending_.push_back(fsm::TransitionEvent{kind, std::move(payload), 0});
}

RunResult Supervisor::run(InputSource& source, bool auto_start) {
  if (auto_start) enqueue(EventKind::StartSession, {{"participant_id", cfg_.participant_id}});
  for (;;) {
    if (result_.events >= event_budget_) {
      result_.status = RunStatus::stalled;
      spdlog::error("event budget of {} exhausted in {}", event_budget_, fsm::to_string(state_.phase));
      break;
    }
    if (!pending_.empty()) {
      auto ev = std::move(pending_.front());
      pending_.pop_front();
      process(std::move(ev));
      continue;
    }
    if (state_.phase == fsm::Phase::Closure) {
      result_.status = aborted_ ? RunStatus::aborted : RunStatus::completed;
      break;
    }
    const auto deadline = wait_ ? wait_->deadline : kNoDeadline;
    if (auto in = source.next(deadline)) {
      handle_input(*in);
      continue;
    }
    if (wait_ && clock_.now_ms() >= wait_->deadline) {
      const auto stage = wait_->stage;
      wait_.reset();
      if (stage == Stage::HumanSpeech) speech_->expire(clock_.now_ms());
      enqueue(EventKind::Timeout, {{"stage", stage}});
      continue;
    }
    if (source.exhausted()) {
      result_.status = RunStatus::input_closed;
      break;
    }
  }
  speech_->cancel();
  {
    std::lock_guard lock(mu_);
    result_.final_state = state_;
  }
  if (dir_) {
    auto meta = store::read_meta(dir_->path());
    meta["finished_at"] = clock_.now_ms();
    meta["status"] = result_.status;
    meta["final_state"] = result_.final_state;
    dir_->write_meta(meta);
  }
  notify({{"type", "session_end"}, {"status", result_.status}});
  return result_;
}

bool Supervisor::process(fsm::TransitionEvent ev) {
  ev.received_at = clock_.now_ms();
  const auto before = state_;
  log_fsm(fsm::event_line(ev, before));
  auto r = fsm::step(before, ev, fsm_cfg_);
  auto line = fsm::transition_line(ev.received_at, before, r, ev.kind);
  log_fsm(line);
  result_.transitions.push_back(line);
  ++result_.events;
  Json note = line;
  note["event"] = ev;
  if (!r.accepted()) {
    ++result_.rejected;
    spdlog::warn("{}", *r.rejection);
    notify(note);
    return false;
  }

  const auto slot = slot_index(before.phase);
  auto& turns = record_.transcript.turns;
  switch (ev.kind) {
    case EventKind::StickerDescribed: {
      auto d = ev.payload.at("description").get<StickerDescription>();
      record_.cube_sequence.push_back(handed_cube_);
      record_.vlm_descriptions.push_back(d);
      slot_descriptions_[slot] = d;
      if (slot == 1) {
        for (auto& t : turns) {
          if (t.kind == TurnKind::human) {
            t.cube_id = d.source_cube;
            t.cube_description = d.text;
          }
        }
      }
      break;
    }
    case EventKind::StorySnippetReady: {
      const auto& d = slot_descriptions_[slot];
      turns.push_back({Speaker::robot, slot == 0 ? TurnKind::opening : TurnKind::ending,
                       ev.payload.at("text").get<std::string>(), d.source_cube, d.text});
      break;
    }
    case EventKind::HumanSpeechFinal:
      turns.push_back({Speaker::human, TurnKind::human, ev.payload.at("text").get<std::string>(), "", ""});
      break;
    case EventKind::RecapDelivered:
      turns.push_back({Speaker::robot, TurnKind::recap, ev.payload.value("text", ""), "", ""});
      break;
    case EventKind::OperatorAbort:
      aborted_ = true;
      break;
    default:
      break;
  }
  if (r.closed_trial) close_trial(*r.closed_trial);
  {
    std::lock_guard lock(mu_);
    state_ = r.state;
  }
  if (state_.trial_open && state_.trial_index != before.trial_index) {
    record_ = store::TrialRecord{};
    record_.trial_index = state_.trial_index;
    slot_descriptions_ = {};
    handed_cube_.clear();
  }
  wait_.reset();
  speech_->cancel();
  notify(note);
  for (const auto& c : r.commands) execute(c);
  return true;
}

void Supervisor::close_trial(const fsm::ClosedTrial& t) {
  record_.trial_index = t.trial_index;
  record_.outcome = t.outcome;
  record_.failure_kind = t.failure_kind;
  try {
    store::validate(record_);
  } catch (const PreconditionViolation& e) {
    spdlog::error("trial {} record invalid: {}", t.trial_index, e.what());
  }
  if (dir_) dir_->persist(record_);
  {
    std::lock_guard lock(mu_);
    result_.records.push_back(record_);
  }
  notify({{"type", "trial_closed"}, {"record", record_}});
}

void Supervisor::speak(const std::string& text) {
  if (!text.empty()) speech_->speak(text);
}

void Supervisor::execute(const fsm::Command& c) {
  using fsm::CommandKind;
  const auto now = clock_.now_ms();
  switch (c.kind) {
    case CommandKind::speak:
    case CommandKind::greet:
      speak(c.args.value("text", ""));
      break;
    case CommandKind::detect_participant:
      wait_ = Wait{Stage::Participant, now + cfg_.timeouts.participant_ms};
      if (cfg_.auto_face()) {
        Json face{{"identity", 1},
                  {"name", cfg_.participant_id},
                  {"bbox", {{"x", 220}, {"y", 120}, {"w", 200}, {"h", 240}}}};
        Json payload{{"faces", Json::array({face})}};
        on_face(Input{InputKind::face, payload, now});
      }
      break;
    case CommandKind::request_cube:
      wait_ = Wait{Stage::Cube, now + cfg_.timeouts.cube_ms};
      break;
    case CommandKind::listen:
      speech_->open_window(Millis(cfg_.timeouts.speech_ms));
      wait_ = Wait{Stage::HumanSpeech, *speech_->window_deadline()};
      break;
    case CommandKind::call_vlm:
      call_vlm(c);
      break;
    case CommandKind::call_llm:
      call_llm(c);
      break;
    case CommandKind::emit_feedback:
      speak(c.args.value("text", ""));
      enqueue(EventKind::FeedbackDelivered, {{"text", c.args.value("text", "")}});
      break;
    case CommandKind::recap:
      call_recap();
      break;
    case CommandKind::express_joy:
      notify({{"type", "gesture"}, {"name", "express_joy"}, {"ts", now}});
      break;
    case CommandKind::recover:
      enqueue(EventKind::RecoveryDone, {{"resume_phase", c.args.value("resume_phase", Json())}});
      break;
  }
}

void Supervisor::call_vlm(const fsm::Command&) {
  genai::CubeRef ref{handed_cube_, std::nullopt};
  if (prompts_.vlm_input == genai::VlmInput::image) {
    if (const auto* e = manifest_.find(handed_cube_); e && !e->asset.empty()) {
      std::filesystem::path asset(e->asset);
      if (asset.is_relative()) asset = std::filesystem::path(data_dir()) / asset;
      ref.image_path = asset.string();
    }
  }
  try {
    genai::Diagnostics diag;
    auto d = genai::describe_sticker(ref, prompts_, *transport_, &diag, &clock_);
    enqueue(EventKind::StickerDescribed, {{"description", d}});
  } catch (const std::exception& e) {
    enqueue(EventKind::ModuleFailure, failure(FailureKind::sticker_detection, e.what()));
  }
}

void Supervisor::call_llm(const fsm::Command& c) {
  const auto step_name = c.args.value("step", "opening");
  const auto step = step_name == "ending" ? SnippetStep::ending : SnippetStep::opening;
  const auto& d = slot_descriptions_[step == SnippetStep::ending ? 2 : 0];
  try {
    genai::Diagnostics diag;
    auto s = genai::generate_snippet(record_.transcript, step, d, prompts_, *transport_,
                                     state_.trial_index, &diag);
    enqueue(EventKind::StorySnippetReady, {{"text", s.text}, {"step", step_name}});
  } catch (const std::exception& e) {
    enqueue(EventKind::ModuleFailure, failure(FailureKind::llm_failure, e.what()));
  }
}

void Supervisor::call_recap() {
  std::vector<std::string> terms;
  for (const auto& id : record_.cube_sequence) terms.push_back(manifest_.head_noun(id));
  try {
    genai::Diagnostics diag;
    auto s = genai::generate_recap(record_.transcript, terms, prompts_, *transport_, state_.trial_index,
                                   &diag);
    speak(s.text);
    enqueue(EventKind::RecapDelivered, {{"text", s.text}});
  } catch (const std::exception& e) {
    enqueue(EventKind::ModuleFailure, failure(FailureKind::llm_failure, e.what()));
  }
}

void Supervisor::reject_input(const Input& in, const std::string& why) {
  ++result_.rejected;
  Json line{{"type", "input_rejected"}, {"ts", clock_.now_ms()}, {"input", in},
            {"phase", state_.phase},     {"awaiting", state_.awaiting}, {"reason", why}};
  log_fsm(line);
  notify(line);
}

void Supervisor::handle_input(const Input& in) {
  switch (in.kind) {
    case InputKind::face:
      on_face(in);
      break;
    case InputKind::gaze:
      on_gaze(in);
      break;
    case InputKind::hand_cube:
      on_cube(in);
      break;
    case InputKind::speech_text: {
      if (!fsm::is_admissible(state_, EventKind::HumanSpeechFinal)) {
        reject_input(in, "not listening");
        break;
      }
      const auto text = in.payload.at("text").get<std::string>();
      auto u = speech_->offer(text, clock_.now_ms());
      if (!u) {
        reject_input(in, "listen window closed");
        break;
      }
      Json line = *u;
      line["trial_index"] = state_.trial_index;
      if (dir_) dir_->append_transcript(line);
      line["type"] = "utterance";
      notify(line);
      enqueue(EventKind::HumanSpeechFinal, {{"text", u->text}});
      break;
    }
    case InputKind::cube_drop:
      if (state_.awaiting != Stage::Cube) {
        reject_input(in, "no cube handover in progress");
        break;
      }
      enqueue(EventKind::ModuleFailure, failure(FailureKind::cube_drop, "cube dropped during handover"));
      break;
    case InputKind::abort:
      if (fsm::is_terminal(state_.phase)) {
        reject_input(in, "no session in progress");
        break;
      }
      enqueue(EventKind::OperatorAbort, in.payload);
      break;
    case InputKind::annotation:
      on_annotation(in);
      break;
    case InputKind::force_retry:
      if (!fsm::is_admissible(state_, EventKind::Timeout)) {
        reject_input(in, "nothing to retry");
        break;
      }
      enqueue(EventKind::Timeout, {{"stage", state_.awaiting}, {"forced", true}});
      break;
    case InputKind::silence:
      break;
  }
}

void Supervisor::on_face(const Input& in) {
  std::vector<perception::FaceDetection> dets;
  std::vector<std::string> names;
  int track = 0;
  for (const auto& f : in.payload.at("faces")) {
    perception::FaceDetection d;
    d.bbox = f.at("bbox").get<perception::Bbox>();
    d.embedding = perception::identity_embedding(f.at("identity").get<int>());
    d.track_id = f.value("track", track++);
    dets.push_back(std::move(d));
    names.push_back(f.value("name", cfg_.participant_id));
  }
  if (dets.empty()) {
    reject_input(in, "EmptyScene: no face in view");
    return;
  }
  try {
    for (const auto& d : dets) perception::validate(d);
    if (!partner_) {
      perception::EnrollOptions opts;
      opts.seed = cfg_.seed;
      partner_ = perception::enroll_partner({perception::FaceFrame{clock_.now_ms(), dets}}, opts);
    }
    auto partner = perception::recognize_partner(dets, *partner_);
    const bool fallback = !partner_->is_partner(partner);
    if (node_) node_->publish_face(partner, fallback);
    if (!fsm::is_admissible(state_, EventKind::ParticipantRecognized)) {
      reject_input(in, "not looking for a participant");
      return;
    }
    std::string name = cfg_.participant_id;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (dets[i].track_id == partner.track_id) name = names[i];
    }
    enqueue(EventKind::ParticipantRecognized,
            {{"participant_id", name}, {"track_id", partner.track_id}, {"fallback", fallback}});
  } catch (const Error& e) {
    reject_input(in, e.what());
  }
}

void Supervisor::on_gaze(const Input& in) {
  if (!gaze_model_) {
    gaze_model_ = perception::train_gaze_model(perception::read_gaze_csv(data_path("gaze_train.csv")));
  }
  perception::HeadPose pose{in.payload.at("yaw").get<double>(), in.payload.at("pitch").get<double>()};
  auto fv = perception::encode_gaze(perception::synthesize_keypoints(pose, rng_));
  auto label = perception::classify_mutual_gaze(fv, *gaze_model_);
  if (node_) node_->publish_gaze(label, clock_.now_ms());
  notify({{"type", "gaze"}, {"label", perception::to_string(label)}, {"ts", clock_.now_ms()}});
}

void Supervisor::on_cube(const Input& in) {
  if (!fsm::is_admissible(state_, EventKind::CubeHandedOver)) {
    reject_input(in, "no cube requested");
    return;
  }
  const auto cube = in.payload.at("cube").get<std::string>();
  perception::CubeObservation obs;
  try {
    if (in.payload.value("misdetect", false)) {
      perception::ObjectDetector forced(
          registry_, {1.0, cfg_.perception.noise_level, cfg_.perception.seed + rng_()});
      obs = forced.detect(cube, clock_.now_ms());
    } else {
      obs = detector_->detect(cube, clock_.now_ms());
    }
  } catch (const perception::NoCubeVisible& e) {
    enqueue(EventKind::ModuleFailure, failure(FailureKind::sticker_detection, e.what()));
    return;
  }
  if (node_) node_->publish_cube(obs);
  if (obs.confidence < cfg_.perception.confidence_threshold) {
    auto p = failure(FailureKind::sticker_detection, "low-confidence detection");
    p["detected"] = obs.class_label;
    p["confidence"] = obs.confidence;
    enqueue(EventKind::ModuleFailure, p);
    return;
  }
  handed_cube_ = cube;
  enqueue(EventKind::CubeHandedOver, {{"cube", obs.class_label}, {"confidence", obs.confidence}});
}

void Supervisor::on_annotation(const Input& in) {
  const int target = in.payload.value("trial_index", state_.trial_index);
  auto apply = [&](store::Annotations& a) {
    a.llm_added_elements = in.payload.value("llm_added_elements", a.llm_added_elements);
    a.llm_fixed_human = in.payload.value("llm_fixed_human", a.llm_fixed_human);
  };
  bool done = false;
  if (state_.trial_open && target == record_.trial_index) {
    apply(record_.annotations);
    done = true;
  } else {
    std::lock_guard lock(mu_);
    for (auto& r : result_.records) {
      if (r.trial_index != target) continue;
      apply(r.annotations);
      if (dir_) dir_->persist(r);
      done = true;
    }
  }
  if (!done) {
    reject_input(in, "no trial " + std::to_string(target));
    return;
  }
  Json line{{"type", "annotation"}, {"ts", clock_.now_ms()}, {"trial_index", target}, {"payload", in.payload}};
  log_fsm(line);
  notify(line);
}

}  // namespace narravine::supervisor
