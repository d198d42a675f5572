#pragma once

#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "narravine/common/json.hpp"
#include "narravine/store/record.hpp"

namespace narravine::store {

inline constexpr const char* kMetaFile = "session.meta";
inline constexpr const char* kFsmLog = "fsm.log";
inline constexpr const char* kGenAiLog = "genai.log";
inline constexpr const char* kTranscriptFile = "transcript.txt";

std::string record_file_name(int trial_index);

// One session's directory. Single writer; every file is JSON text.
class SessionDir {
 public:
  // Creates the directory if needed. Throws IoFailure.
  explicit SessionDir(std::filesystem::path dir);

  const std::filesystem::path& path() const { return dir_; }

  void write_meta(const Json& meta);
  std::filesystem::path persist(const TrialRecord& r);
  void append_fsm(const Json& line);
  void append_genai(const Json& line);
  void append_transcript(const Json& line);

 private:
  void append(const char* file, const Json& line);

  std::filesystem::path dir_;
  std::mutex mu_;
};

std::filesystem::path persist(const TrialRecord& r, const std::filesystem::path& dir);
TrialRecord load_record(const std::filesystem::path& file);
// trial_<k>.rec files sorted by k
std::vector<TrialRecord> load_records(const std::filesystem::path& dir);
Json read_meta(const std::filesystem::path& dir);
std::vector<Json> read_lines(const std::filesystem::path& file);

}  // namespace narravine::store
