#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrefl/config.hpp"
#include "qrefl/grid_packet.hpp"
#include "qrefl/spectral.hpp"

namespace qrefl::output {

/// "# qrefl x.y.z" plus the resolved config on one comment line.
std::string csv_header(const ScenarioConfig& c);

/// Ordered JSON document whose first member records tool version and config.
nlohmann::ordered_json json_document(const ScenarioConfig& c);

/// Fixed-format number used in every table, so reruns are byte-identical.
std::string fmt(double v);

/// Writes `content` to `path`, replacing any previous file.
void write_file(const std::filesystem::path& path, const std::string& content);

/// Tables in SI units: x in m, |psi|^2 in 1/m, k in 1/m, rho'(k) in m.
std::string coordinate_table(const ScenarioConfig& c, const WaveField& f, std::size_t max_rows = 20000);
std::string momentum_table(const ScenarioConfig& c, const MomentumSpectrum& s, double k_abs_max);
std::string z_table(const ScenarioConfig& c, const ZDistribution& z, double z_lo, double z_hi);

/// Appends one decimated snapshot (t_s, x_m, density_per_m rows) to `out`.
void append_snapshot(std::ostream& out, const WaveField& f, std::size_t max_rows = 2000);

nlohmann::ordered_json sideband_json(const SidebandReport& r);

}  // namespace qrefl::output
