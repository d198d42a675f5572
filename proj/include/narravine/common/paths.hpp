#pragma once

#include <string>

namespace narravine {

// Shipped data directory: $NARRAVINE_DATA_DIR, else the build-time default.
std::string data_dir();
std::string data_path(const std::string& name);

}  // namespace narravine
