#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

#include "slicesim/model.hpp"

namespace slicesim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The full default configuration as a JSON tree. Every addressable field
// appears here; files overlay it and may not introduce keys outside it.
nlohmann::json default_config_json();

// Overlays `overrides` onto the defaults. Unknown keys, type mismatches and
// invariant violations raise ConfigError listing every problem found.
std::pair<ScenarioConfig, VideoCatalog> parse_config(const nlohmann::json& overrides);

// Reads and parses a config file (JSON).
std::pair<ScenarioConfig, VideoCatalog> load_config(const std::string& path);
nlohmann::json load_config_json(const std::string& path);

// Dot-path access used by experiment sweeps, e.g. "control.eta".
// Lookup failures raise ConfigError.
bool config_path_exists(const nlohmann::json& tree, const std::string& path);
void set_config_value(nlohmann::json& tree, const std::string& path,
                      const nlohmann::json& value);

// FNV-1a over the canonical (sorted-key) serialization.
std::string config_hash(const nlohmann::json& tree);

}  // namespace slicesim
