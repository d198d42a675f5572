#pragma once

#include <json.hpp>

namespace narravine {

using Json = nlohmann::json;

}  // namespace narravine
