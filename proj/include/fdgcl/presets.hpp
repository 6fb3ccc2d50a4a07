#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace fdgcl::presets {

std::vector<std::string> names();
/// Parsed preset JSON; throws ConfigError for an unknown name.
nlohmann::json get(std::string_view name);

}  // namespace fdgcl::presets
