#pragma once

#include <json.hpp>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "schatten/harness.hpp"

namespace schatten {

/// Flat key/value text with [sections]: numbers, quoted strings, booleans and flat arrays.
using ConfigValue = std::variant<double, std::string, bool, std::vector<double>, std::vector<std::string>>;
using ConfigTable = std::map<std::string, std::map<std::string, ConfigValue>>;

/// Keys before the first section header land in section "".
ConfigTable parse_config_text(const std::string& text);
ConfigTable load_config_file(const std::string& path);

/// Top-level keys, then keys of the [<experiment>] section; thresholds from
/// [thresholds] and [<experiment>.thresholds].
ExperimentConfig resolve_experiment(const ConfigTable& table, const std::string& experiment);

Shift parse_shift(const std::string& text, int dim);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// FNV-1a of the sorted-key JSON echo, as 16 hex digits.
std::string config_hash(const nlohmann::json& echo);

}  // namespace schatten
