#pragma once

#include <filesystem>
#include <string>

#include "baroatt/harness.hpp"

namespace baroatt {

/// Reads a YAML campaign file. Missing keys keep their reference_config() values;
/// unknown keys are rejected. The inertial magnetic field is normalized on
/// load. Throws std::runtime_error naming the offending key on any error.
CampaignConfig load_config(const std::filesystem::path& path);
CampaignConfig parse_config(const std::string& yaml_text);

/// YAML text that load_config() maps back to the same configuration.
std::string dump_config(const CampaignConfig& cfg);

}  // namespace baroatt
