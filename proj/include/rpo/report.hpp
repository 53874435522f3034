#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "rpo/montecarlo.hpp"
#include "rpo/scenario.hpp"

namespace rpo {

/// Shortest round-trip decimal representation.
std::string format_double(double value);

void write_run_csv(std::ostream& out, const RunLog& log);
std::string metrics_json(const std::vector<RunResult>& results, const ScenarioConfig& config);

/// Writes run.csv (or run_<strategy>.csv for sweeps), metrics.json and SVG plots into dir.
/// Returns the paths written.
std::vector<std::filesystem::path> write_run_outputs(const std::filesystem::path& dir,
                                                     const std::vector<RunResult>& results,
                                                     const ScenarioConfig& config);

void write_prune_csv(std::ostream& out, const std::vector<double>& etas,
                     const std::vector<PruneMcResult>& results);

}  // namespace rpo
