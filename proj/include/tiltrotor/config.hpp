#pragma once

#include <filesystem>
#include <string>

#include "tiltrotor/simkernel.hpp"

namespace tiltrotor {

/// JSON scenario files.
///
/// Every key is optional; omitted keys keep the value of default_scenario().
/// Unknown keys and a mismatched "schema" tag are ConfigErrors. Gain blocks
/// accept either one object (applied to all three axes) or an array of three
/// objects (roll, pitch, yaw).
ScenarioConfig scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const ScenarioConfig& config);

/// Throws IoError when the file cannot be read, ConfigError when it is invalid.
ScenarioConfig load_scenario(const std::filesystem::path& path);
void save_scenario(const ScenarioConfig& config, const std::filesystem::path& path);

}  // namespace tiltrotor
