// Command-line front end: qrefl <subcommand> <config.json> [options]

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "qrefl/commands.hpp"
#include "qrefl/config.hpp"
#include "qrefl/errors.hpp"
#include "qrefl/scan.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Quantum reflection from static and oscillating Casimir-van der Waals surfaces"};
  app.set_version_flag("--version", qrefl::kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::size_t jobs = qrefl::default_jobs();
  std::vector<double> velocities;
  std::optional<double> v_mps, x0_m;
  std::string out_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--jobs,-j", jobs, "Worker threads for parameter scans")->check(CLI::PositiveNumber);
    sub->add_option("--out,-o", out_dir, "Override output.directory");
  };

  auto* static_scan = app.add_subcommand("static-scan", "x0 scan of the static surface, both methods");
  add_common(static_scan);
  auto* driven = app.add_subcommand("driven", "Oscillating-surface run with sideband analysis");
  add_common(driven);
  auto* sweep = app.add_subcommand("velocity-sweep", "Per-velocity driven scans with sideband extrapolation");
  add_common(sweep);
  sweep->add_option("--velocities", velocities, "Incident speeds in m/s (default: analysis.velocities_mps)");
  auto* stationary = app.add_subcommand("stationary", "Single stationary-scattering reflectivity");
  add_common(stationary);
  stationary->add_option("--v", v_mps, "Incident speed in m/s");
  stationary->add_option("--x0", x0_m, "Connection point in m");
  auto* validate = app.add_subcommand("validate-config", "Print the resolved configuration");
  validate->add_option("config", config_path, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    qrefl::ScenarioConfig config = qrefl::load_config(config_path);
    if (!out_dir.empty()) config.output.directory = out_dir;

    if (*static_scan) {
      std::cout << qrefl::cli::run_static_scan(config, jobs).dump(2) << '\n';
    } else if (*driven) {
      std::cout << qrefl::cli::run_driven(config, jobs).dump(2) << '\n';
    } else if (*sweep) {
      std::cout << qrefl::cli::run_velocity_sweep(config, velocities, jobs);
    } else if (*stationary) {
      std::cout << qrefl::cli::stationary_query(config, v_mps, x0_m).dump(2) << '\n';
    } else if (*validate) {
      std::cout << qrefl::to_json(config).dump(2) << '\n';
    }
  } catch (const qrefl::ConfigError& e) {
    std::cerr << qrefl::cli::error_json(e).dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << qrefl::cli::error_json(e).dump() << '\n';
    return 1;
  }
  return 0;
}
