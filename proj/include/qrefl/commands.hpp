#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrefl/config.hpp"

namespace qrefl::cli {

/// static_scan.csv and static_extrapolation.json in the output directory.
/// Returns the extrapolation document.
nlohmann::ordered_json run_static_scan(const ScenarioConfig& c, std::size_t jobs);

/// Detailed run at the first x0 (coordinate, momentum and z densities plus
/// sidebands.json); with several x0 values also driven_scan.csv and
/// driven_extrapolation.json. Returns the sideband document.
nlohmann::ordered_json run_driven(const ScenarioConfig& c, std::size_t jobs);

/// velocity_sweep.csv; velocities default to analysis.velocities_mps.
std::string run_velocity_sweep(const ScenarioConfig& c, const std::vector<double>& velocities,
                               std::size_t jobs);

/// Single stationary oracle query at (v, x0), SI in and out.
nlohmann::ordered_json stationary_query(const ScenarioConfig& c, std::optional<double> v_mps,
                                        std::optional<double> x0_m);

/// Machine-readable error report written to stderr on failure.
nlohmann::ordered_json error_json(const std::exception& e);

std::filesystem::path output_dir(const ScenarioConfig& c);

}  // namespace qrefl::cli
