#pragma once

#include <string>
#include <vector>

#include "rpo/montecarlo.hpp"
#include "rpo/scenario.hpp"

namespace rpo {

/// Settings for the pruning Monte Carlo / demo subcommand (`prune_mc:` block).
struct PruneMcSettings {
  PruneMcConfig base;
  std::vector<double> etas{0.8};
};

struct ConfigBundle {
  ScenarioConfig scenario;
  PruneMcSettings prune_mc;
};

/// Parse YAML text; missing keys keep their defaults. Throws ConfigError on bad values.
ConfigBundle parse_config(const std::string& yaml_text);
ConfigBundle load_config(const std::string& path);

}  // namespace rpo
