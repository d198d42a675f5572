#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "narravine/common/clock.hpp"
#include "narravine/common/stickers.hpp"
#include "narravine/fsm/log.hpp"
#include "narravine/genai/clients.hpp"
#include "narravine/perception/node.hpp"
#include "narravine/speech/speech.hpp"
#include "narravine/store/session_dir.hpp"
#include "narravine/supervisor/config.hpp"
#include "narravine/supervisor/input.hpp"

namespace narravine::supervisor {

enum class RunStatus { completed, aborted, input_closed, stalled };

NLOHMANN_JSON_SERIALIZE_ENUM(RunStatus, {{RunStatus::completed, "completed"},
                                         {RunStatus::aborted, "aborted"},
                                         {RunStatus::input_closed, "input_closed"},
                                         {RunStatus::stalled, "stalled"}})

struct RunResult {
  RunStatus status = RunStatus::completed;
  std::vector<store::TrialRecord> records;
  fsm::SessionState final_state;
  std::vector<Json> transitions;
  int events = 0;
  int rejected = 0;
};

// Builds the GenAI transport the config asks for. A scene's inline mock
// fixture is used unless the config names a fixture file.
std::unique_ptr<genai::Transport> make_transport(const SessionConfig& c, Clock& clock,
                                                 const Json& scene_mock = {});

// Owns one session: the FSM event loop plus the simulated modules that
// execute its commands. Every accepted or rejected event lands in fsm.log.
class Supervisor {
 public:
  using Observer = std::function<void(const Json&)>;

  Supervisor(SessionConfig cfg, Clock& clock, genai::Transport& transport,
             portnet::Bus* bus = nullptr);
  ~Supervisor();

  void set_observer(Observer obs) { observer_ = std::move(obs); }
  // Guards against livelock; the run stops as stalled past this many events.
  void set_event_budget(int n) { event_budget_ = n; }

  RunResult run(InputSource& source, bool auto_start = true);

  // Consistent snapshots for concurrent readers.
  fsm::SessionState state() const;
  Json state_json() const;

  const SessionConfig& config() const { return cfg_; }

 private:
  struct Wait {
    fsm::Stage stage;
    std::int64_t deadline;
  };

  bool process(fsm::TransitionEvent ev);
  void execute(const fsm::Command& c);
  void handle_input(const Input& in);
  void on_face(const Input& in);
  void on_gaze(const Input& in);
  void on_cube(const Input& in);
  void on_annotation(const Input& in);
  void reject_input(const Input& in, const std::string& why);
  void enqueue(fsm::EventKind kind, Json payload = Json::object());
  void close_trial(const fsm::ClosedTrial& t);
  void log_fsm(const Json& line);
  void notify(const Json& ev);
  void speak(const std::string& text);
  void call_vlm(const fsm::Command& c);
  void call_llm(const fsm::Command& c);
  void call_recap();
  std::string participant_from_face();

  SessionConfig cfg_;
  fsm::FsmConfig fsm_cfg_;
  genai::PromptConfig prompts_;
  Clock& clock_;
  genai::Transport& raw_transport_;
  std::unique_ptr<genai::RecordingTransport> transport_;
  portnet::Bus* bus_;
  std::unique_ptr<perception::PerceptionNode> node_;
  std::unique_ptr<store::SessionDir> dir_;
  StickerManifest manifest_;
  perception::ClassRegistry registry_;
  std::unique_ptr<perception::ObjectDetector> detector_;
  std::optional<perception::PartnerModel> partner_;
  std::optional<perception::GazeModel> gaze_model_;
  std::unique_ptr<speech::ConsoleSpeech> speech_;
  Observer observer_;
  int event_budget_ = 5000;
  std::mt19937_64 rng_;

  mutable std::mutex mu_;
  fsm::SessionState state_;
  std::deque<fsm::TransitionEvent> pending_;
  std::optional<Wait> wait_;
  RunResult result_;
  bool aborted_ = false;

  // current trial
  store::TrialRecord record_;
  std::string handed_cube_;  // ground truth of the cube being described
  std::array<StickerDescription, 3> slot_descriptions_;
};

}  // namespace narravine::supervisor
