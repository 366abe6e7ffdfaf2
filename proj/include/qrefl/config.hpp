#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qrefl {

inline constexpr const char* kToolVersion = "qrefl 0.1.0";

/// Scenario file contents, in the lab units named by each key suffix.
/// Defaults describe helium-3 at 2 m/s in front of silicon.
struct ScenarioConfig {
  struct Particle {
    double mass_u = 3.01603;
    double v_mps = 2.0;  ///< speed towards the surface
    double dv_rel = 0.03;
    double x_center_m = 4.5e-6;
  } particle;

  struct Surface {
    double c4_eVA4 = 23.25;
    double l_A = 93.0;
  } surface;

  std::vector<double> x0_m{4e-10};  ///< connection points, sorted ascending

  struct Drive {
    double d_m = 4e-9;
    std::optional<double> omega_radps;
    std::optional<double> omega_ratio;  ///< omega / omega_in
  };
  std::optional<Drive> drive;

  struct Grid {
    double dx_m = 0.0;
    double dt_s = 0.0;
    double x_min_m = 0.0;
    double x_max_m = 0.0;
    std::size_t fft_padding = 4;
    /// Drive changes below this fraction of the mean kinetic energy leave the
    /// potential frozen at its rest value. 0: refactor every row each step.
    double drive_freeze_rel = 1e-8;
  } grid;

  struct Stop {
    std::string kind = "fixed";  ///< "fixed" | "stationary"
    double t_final_s = 3.4e-6;   ///< 0: derived from the packet geometry
    double epsilon = 1e-5;
    std::size_t window_steps = 0;
    std::size_t max_steps = 50'000'000;
  };

  struct Analysis {
    int n_min = -3;
    int n_max = 3;
    Stop stop;
    std::vector<std::string> methods{"time-dependent", "stationary"};
    std::vector<double> velocities_mps;
    std::string static_method = "stationary";  ///< velocity sweep reference
    std::string averaging = "double-geometric";
  } analysis;

  struct Output {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
    std::size_t snapshot_every = 0;
  } output;

  /// Throws ConfigError with the offending field path.
  void validate() const;
  bool driven() const { return drive.has_value() && drive->d_m > 0.0; }
};

ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);
/// Fully resolved config (defaults filled in) as JSON.
nlohmann::json to_json(const ScenarioConfig& c);

/// n evenly spaced values in [lo, hi] (inclusive).
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace qrefl
