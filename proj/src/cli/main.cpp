#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "narravine/portnet/bus.hpp"
#include "narravine/questionnaires/report.hpp"
#include "narravine/supervisor/gateway.hpp"
#include "narravine/supervisor/scene.hpp"

namespace fs = std::filesystem;
using namespace narravine;
using namespace narravine::supervisor;

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, aborted = 3, boot_failure = 4, stalled = 5 };

std::atomic<bool> interrupted{false};

struct Flags {
  std::string config;
  int trials = 0;
  std::string mock_genai;
  int port_base = -1;
  std::string listen = "127.0.0.1:8080";
  std::string out;
  bool wait_start = false;
  bool once = false;
};

SessionConfig base_config(const Flags& f) {
  return f.config.empty() ? SessionConfig{} : load_config(f.config);
}

// Command-line flags beat the config file and the scene.
SessionConfig apply_flags(SessionConfig c, const Flags& f) {
  if (f.trials > 0) c.trials_total = f.trials;
  if (!f.mock_genai.empty()) {
    c.genai_transport = "mock";
    c.genai_fixture = f.mock_genai;
  }
  if (f.port_base >= 0) c.port_base = static_cast<std::uint16_t>(f.port_base);
  if (!f.out.empty()) c.output_dir = f.out;
  return c;
}

std::unique_ptr<portnet::Bus> make_bus(const SessionConfig& c) {
  if (c.port_base == 0) return nullptr;
  return std::make_unique<portnet::Bus>();
}

Json summarize(const RunResult& r, const SessionConfig& c) {
  Json trials = Json::array();
  for (const auto& rec : r.records) {
    trials.push_back({{"trial_index", rec.trial_index},
                      {"outcome", rec.outcome},
                      {"failure_kind", rec.failure_kind ? Json(*rec.failure_kind) : Json(nullptr)},
                      {"cubes", rec.cube_sequence}});
  }
  return Json{{"status", r.status},
              {"session_dir", c.output_dir},
              {"events", r.events},
              {"rejected", r.rejected},
              {"final_phase", r.final_state.phase},
              {"trials", trials},
              {"metrics", store::compute_metrics(r.records, StickerManifest::load(c.manifest_path()))}};
}

int exit_for(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return ok;
    case RunStatus::aborted: return aborted;
    default: return stalled;
  }
}

int cmd_validate(const Flags& f) {
  auto c = apply_flags(base_config(f), f);
  validate(c);
  if (!c.interactive()) load_scene(c.scene);
  std::cout << Json(c).dump(2) << "\n";
  return ok;
}

int cmd_replay(const Flags& f, const std::string& scene_path) {
  auto c = base_config(f);
  auto scene = load_scene(scene_path);
  c.scene = scene_path;
  c = apply_flags(apply_scene(c, scene), f);
  if (c.output_dir.empty()) c.output_dir = (fs::path("sessions") / scene.name).string();
  validate(c);
  ManualClock clock;
  auto transport = make_transport(c, clock, f.mock_genai.empty() ? scene.genai : Json());
  auto bus = make_bus(c);
  Supervisor sup(c, clock, *transport, bus.get());
  ScriptedSource source(scene.events, clock);
  const auto r = sup.run(source);
  std::cout << summarize(r, c).dump(2) << "\n";
  return exit_for(r.status);
}

int cmd_run(const Flags& f) {
  auto c = apply_flags(base_config(f), f);
  c.scene = kInteractive;
  validate(c);
  auto [host, port] = parse_listen(f.listen);
  auto bus = make_bus(c);
  SessionController ctl(c, bus.get());
  Gateway gw(ctl);
  const int bound = gw.start(host, port);
  std::cout << "gateway listening on http://" << host << ":" << bound << std::endl;
  std::signal(SIGINT, [](int) { interrupted = true; });
  std::signal(SIGTERM, [](int) { interrupted = true; });
  bool started = false;
  if (!f.wait_start) {
    ctl.start(Json::object());
    started = true;
  }
  while (!interrupted) {
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    if (ctl.running()) started = true;
    if (f.once && started && !ctl.running()) break;
  }
  ctl.stop();
  gw.stop();
  auto last = ctl.wait();
  if (last) {
    c.output_dir = ctl.session_dir();
    std::cout << summarize(*last, c).dump(2) << "\n";
  }
  return last ? exit_for(last->status) : ok;
}

int cmd_analyze(const std::string& dir, const std::string& questionnaires, const std::string& manifest_path) {
  if (!fs::is_directory(dir)) throw IoFailure("no session directory " + dir);
  const auto records = store::load_records(dir);
  std::string manifest_file = manifest_path;
  Json meta = Json::object();
  if (fs::exists(fs::path(dir) / store::kMetaFile)) {
    meta = store::read_meta(dir);
    if (manifest_file.empty() && meta.contains("config")) {
      manifest_file = meta["config"].value("manifest", "");
    }
  }
  if (manifest_file.empty()) manifest_file = SessionConfig{}.manifest_path();
  const auto manifest = StickerManifest::load(manifest_file);
  Json trials = Json::array();
  for (const auto& r : records) trials.push_back(r);
  Json report{{"session_dir", dir},
              {"metrics", store::compute_metrics(records, manifest)},
              {"trials", trials}};
  const auto log = fs::path(dir) / store::kFsmLog;
  if (fs::exists(log)) {
    int transitions = 0, rejected = 0;
    for (const auto& line : store::read_lines(log)) {
      if (line.value("type", "") == "transition") {
        ++transitions;
        if (!line.value("accepted", true)) ++rejected;
      } else if (line.value("type", "") == "input_rejected") {
        ++rejected;
      }
    }
    report["fsm"] = {{"transitions", transitions}, {"rejected", rejected}};
  }
  if (meta.contains("prompts")) report["prompts"] = meta["prompts"];
  if (!questionnaires.empty()) report["questionnaires"] = questionnaires::analyze_questionnaires(questionnaires);
  std::cout << report.dump(2) << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"narravine: storytelling session supervisor"};
  app.require_subcommand(1);
  Flags f;
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress");

  auto add_session_flags = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "Session config file");
    sub->add_option("--trials", f.trials, "Number of stories")->check(CLI::PositiveNumber);
    sub->add_option("--mock-genai", f.mock_genai, "Use the mock GenAI transport with this fixture");
    sub->add_option("--port-base", f.port_base, "Middleware port base (0 disables the ports)")
        ->check(CLI::Range(0, 65535));
    sub->add_option("--out", f.out, "Session output directory");
  };

  auto* run = app.add_subcommand("run", "Serve a live session over the gateway");
  add_session_flags(run);
  run->add_option("--listen", f.listen, "Gateway address host:port");
  run->add_flag("--wait-start", f.wait_start, "Wait for POST /api/session/start");
  run->add_flag("--once", f.once, "Exit when the first session ends");

  std::string scene;
  auto* replay = app.add_subcommand("replay", "Run a scripted scene headless");
  add_session_flags(replay);
  replay->add_option("scene", scene, "Scene script")->required();

  std::string session_dir, questionnaire_dir, manifest;
  auto* analyze = app.add_subcommand("analyze", "Metrics and questionnaire report for a session");
  analyze->add_option("session_dir", session_dir, "Session directory")->required();
  analyze->add_option("--questionnaires", questionnaire_dir, "Directory with sus/ueq/adhoc CSVs");
  analyze->add_option("--manifest", manifest, "Sticker manifest");

  auto* check = app.add_subcommand("validate-config", "Check a config file");
  add_session_flags(check);

  bool dot = false;
  auto* graph = app.add_subcommand("graph", "Print the protocol graph");
  graph->add_flag("--dot", dot, "Graphviz output instead of JSON");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::err);

  try {
    if (*run) return cmd_run(f);
    if (*replay) return cmd_replay(f, scene);
    if (*analyze) return cmd_analyze(session_dir, questionnaire_dir, manifest);
    if (*check) return cmd_validate(f);
    if (*graph) {
      std::cout << (dot ? fsm::graph_dot() : fsm::graph_json().dump(2) + "\n");
      return ok;
    }
  } catch (const ConfigError& e) {
    std::cerr << "ConfigError: " << e.what() << "\n";
    return config_error;
  } catch (const ModuleBootFailure& e) {
    std::cerr << "ModuleBootFailure: " << e.what() << "\n";
    return boot_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return failure;
  }
  return ok;
}
