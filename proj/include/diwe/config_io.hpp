#pragma once

#include <string>

#include "diwe/ensemble.hpp"

namespace diwe {

/// Parses a config JSON document. Every DiweConfig field is optional and
/// keeps its default when absent; unknown keys are rejected (ConfigError).
DiweConfig parse_config_json(const std::string& text);

/// Reads and parses a config file.
DiweConfig load_config_file(const std::string& path);

/// Serializes a config (used in run metadata).
std::string config_to_json(const DiweConfig& config);

}  // namespace diwe
