// Harness configuration: JSON file in, typed config out, with field-path
// diagnostics for every invariant violation.

#ifndef POPT_CONFIG_HPP
#define POPT_CONFIG_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "popt/consensus.hpp"

namespace popt {

struct HarnessConfig {
  ProspectParams prospect;
  ScenarioConfig scenario;
  RoundConfig round;
  int rounds = 50;
};

/// Canonical defaults: alpha=beta=0.88, lambda=2.25, phi=0.74,
/// price floor 0.5, 100 applicant-eligible nodes.
HarnessConfig default_config();

/// All invariant violations, each prefixed with its field path. Empty
/// means the document is valid.
std::vector<std::string> validate_config_json(const nlohmann::json& doc);

/// Parse and validate; throws std::invalid_argument listing every error.
HarnessConfig parse_config(const nlohmann::json& doc);

HarnessConfig load_config_file(const std::string& path);

nlohmann::json config_to_json(const HarnessConfig& cfg);

}  // namespace popt

#endif  // POPT_CONFIG_HPP
