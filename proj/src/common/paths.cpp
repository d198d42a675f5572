#include "narravine/common/paths.hpp"

#include <cstdlib>

namespace narravine {

std::string data_dir() {
  if (const char* d = std::getenv("NARRAVINE_DATA_DIR"); d && *d) return d;
  return NARRAVINE_DEFAULT_DATA_DIR;
}

std::string data_path(const std::string& name) { return data_dir() + "/" + name; }

}  // namespace narravine
