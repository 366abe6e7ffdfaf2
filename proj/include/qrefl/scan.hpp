#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrefl/config.hpp"
#include "qrefl/errors.hpp"
#include "qrefl/grid_packet.hpp"
#include "qrefl/potential.hpp"
#include "qrefl/propagator.hpp"
#include "qrefl/spectral.hpp"

namespace qrefl {

/// Everything one time-dependent run needs, in atomic units.
struct SimulationPlan {
  double x0_m = 0.0;
  double mass = 0.0;
  double omega_in = 0.0;  ///< incident kinetic energy / hbar
  PotentialParams potential{};
  PacketSpec packet{};
  GridPlan grid{};
  StopRule stop = FixedTime{0.0};
  double t_final = 0.0;  ///< planning horizon (the fixed stop time when fixed)
  double x_probe = 0.0;
  std::size_t max_steps = 0;
  std::size_t fft_padding = 1;
  double frozen_potential_tol = 0.0;  ///< Hartree; see PropagateOptions
  int n_min = 0;
  int n_max = 0;
};

/// Resolves a scenario at one connection point into a runnable plan.
SimulationPlan plan_simulation(const ScenarioConfig& c, double x0_m);

/// Geometry-derived stop time: the packet tail (4 sigma) reaches the surface
/// and the slowest outgoing channel clears 200 nm.
double default_final_time(const ScenarioConfig& c);

struct TimeDependentRun {
  PropagationResult propagation;
  MomentumSpectrum spectrum;
  double reflectivity = 0.0;  ///< k > 0 probability
  std::optional<ZDistribution> z;
  std::optional<SidebandReport> sidebands;
};

TimeDependentRun run_time_dependent(const SimulationPlan& plan, const PropagateOptions& extra = {});

/// Stationary oracle at the packet's mean wavenumber.
double run_stationary(const ScenarioConfig& c, double x0_m);

enum class Method { time_dependent, stationary };
Method parse_method(const std::string& name);
std::string method_name(Method m);

struct ScanPoint {
  double x0_m = 0.0;
  double value = 0.0;                       ///< R (static) or R_tot (driven)
  std::optional<SidebandReport> sidebands;  ///< driven time-dependent points
  std::string error;                        ///< empty on success
};

/// Averages between subsequent maxima, pluggable so variants can be compared.
enum class Averaging { double_geometric, arithmetic };
Averaging parse_averaging(const std::string& name);

struct ReflectivityScan {
  std::vector<ScanPoint> points;  ///< ascending in x0
  std::vector<std::size_t> maxima_indices;
  std::optional<double> extrapolated;
  /// Per-order extrapolations for driven scans (order -> R_n) and their total.
  std::map<int, double> extrapolated_orders;
  std::optional<double> extrapolated_total;

  std::vector<double> values() const;
  bool failed() const;
};

/// Thrown by scan_x0 when points failed; carries the partial scan.
class ScanError : public Error {
 public:
  ScanError(const std::string& message, ReflectivityScan partial)
      : Error("scan-point", message), partial_(std::move(partial)) {}
  const ReflectivityScan& partial() const noexcept { return partial_; }

 private:
  ReflectivityScan partial_;
};

/// Runs fn(i) for i in [0, n) on at most `jobs` threads. Exceptions are
/// captured per index and returned as messages (empty on success).
std::vector<std::string> parallel_for(std::size_t n, std::size_t jobs,
                                      const std::function<void(std::size_t)>& fn);

std::size_t default_jobs();

/// One point per x0 (sorted internally), computed independently. Points that
/// fail are recorded and a ScanError carrying the whole scan is thrown.
ReflectivityScan scan_x0(const ScenarioConfig& c, std::vector<double> x0_values, Method method,
                         std::size_t jobs = 1, Averaging averaging = Averaging::double_geometric);

/// i with v[i] > v[i-1] and v[i] > next differing neighbour; plateaus report
/// their leftmost index.
std::vector<std::size_t> find_local_maxima(std::span<const double> values);
std::vector<std::size_t> find_local_maxima(const ReflectivityScan& scan);

/// For each pair of subsequent maxima: combine the value at the first
/// maximum with the smallest value strictly between them; then combine the
/// per-interval results. Geometric means for double_geometric, arithmetic
/// means otherwise. Throws ExtrapolationUnavailable with fewer than 2 maxima.
double average_between_maxima(std::span<const double> values, std::span<const std::size_t> maxima,
                              Averaging how);

double double_geometric_average(const ReflectivityScan& scan);

struct VelocityRow {
  double v_mps = 0.0;
  double r_m1 = 0.0, r_0 = 0.0, r_p1 = 0.0, r_tot = 0.0, r_static = 0.0;
  std::string error;
};

/// Driven x0 scan per velocity with per-order extrapolation, plus the static
/// reference (analysis.static_method). Failures are recorded per row.
std::vector<VelocityRow> velocity_sweep(const ScenarioConfig& c, const std::vector<double>& velocities,
                                        std::size_t jobs = 1);

}  // namespace qrefl
