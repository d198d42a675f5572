#include "narravine/store/session_dir.hpp"

#include <algorithm>
#include <fstream>
#include <regex>

namespace narravine::store {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& content) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoFailure("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoFailure("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) throw IoFailure("cannot rename into " + p.string() + ": " + ec.message());
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw IoFailure("cannot read " + p.string());
  try {
    Json j;
    in >> j;
    return j;
  } catch (const Json::exception& e) {
    throw IoFailure(p.string() + ": " + e.what());
  }
}

}  // namespace

std::string record_file_name(int trial_index) { return "trial_" + std::to_string(trial_index) + ".rec"; }

SessionDir::SessionDir(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    throw IoFailure("cannot create session directory " + dir_.string() + (ec ? ": " + ec.message() : ""));
  }
}

void SessionDir::write_meta(const Json& meta) {
  std::lock_guard lock(mu_);
  write_file(dir_ / kMetaFile, meta.dump(2) + "\n");
}

fs::path SessionDir::persist(const TrialRecord& r) {
  std::lock_guard lock(mu_);
  return store::persist(r, dir_);
}

void SessionDir::append(const char* file, const Json& line) {
  std::lock_guard lock(mu_);
  std::ofstream out(dir_ / file, std::ios::app);
  if (!out) throw IoFailure(std::string("cannot append to ") + (dir_ / file).string());
  out << line.dump() << '\n';
  out.flush();
  if (!out) throw IoFailure(std::string("append failed for ") + (dir_ / file).string());
}

void SessionDir::append_fsm(const Json& line) { append(kFsmLog, line); }
void SessionDir::append_genai(const Json& line) { append(kGenAiLog, line); }
void SessionDir::append_transcript(const Json& line) { append(kTranscriptFile, line); }

fs::path persist(const TrialRecord& r, const fs::path& dir) {
  validate(r);
  if (!fs::is_directory(dir)) throw IoFailure("not a directory: " + dir.string());
  const auto p = dir / record_file_name(r.trial_index);
  write_file(p, Json(r).dump(2) + "\n");
  return p;
}

TrialRecord load_record(const fs::path& file) {
  try {
    return read_json(file).get<TrialRecord>();
  } catch (const Json::exception& e) {
    throw IoFailure(file.string() + ": " + e.what());
  }
}

std::vector<TrialRecord> load_records(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoFailure("not a session directory: " + dir.string());
  static const std::regex name(R"(trial_(\d+)\.rec)");
  std::vector<std::pair<int, fs::path>> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::smatch m;
    const auto fname = e.path().filename().string();
    if (std::regex_match(fname, m, name)) files.emplace_back(std::stoi(m[1]), e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<TrialRecord> out;
  for (const auto& [k, p] : files) out.push_back(load_record(p));
  return out;
}

Json read_meta(const fs::path& dir) { return read_json(dir / kMetaFile); }

std::vector<Json> read_lines(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoFailure("cannot read " + file.string());
  std::vector<Json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line));
    } catch (const Json::exception& e) {
      throw IoFailure(file.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace narravine::store
