#include "qrefl/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "qrefl/log.hpp"
#include "qrefl/stationary.hpp"
#include "qrefl/units.hpp"

namespace qrefl {
namespace {

PacketSpec packet_for(const ScenarioConfig& c) {
  const double mass = units::mass_u(c.particle.mass_u);
  return PacketSpec{units::length_m(c.particle.x_center_m), -units::velocity_mps(c.particle.v_mps),
                    c.particle.dv_rel, mass};
}

double drive_frequency(const ScenarioConfig& c, double omega_in) {
  if (!c.drive) return 0.0;
  if (c.drive->omega_radps) return units::frequency_radps(*c.drive->omega_radps);
  return c.drive->omega_ratio.value_or(0.0) * omega_in;
}

PotentialParams surface_for(const ScenarioConfig& c, double x0_m, double omega) {
  PotentialParams p{units::c4_eVA4(c.surface.c4_eVA4),
                    units::length_m(c.surface.l_A * units::angstrom), units::length_m(x0_m), 0.0,
                    0.0};
  if (c.drive) {
    p.d = units::length_m(c.drive->d_m);
    p.omega = omega;
  }
  p.validate();
  return p;
}

}  // namespace

double default_final_time(const ScenarioConfig& c) {
  const PacketSpec packet = packet_for(c);
  const double speed = std::abs(packet.v_mean);
  const double v_in_slow = speed * std::max(1.0 - 4.0 * packet.dv_rel, 0.1);
  const double t_in = (packet.x_center + 4.0 * packet.sigma_x()) / v_in_slow;
  const double e_slow = 0.5 * packet.mass * v_in_slow * v_in_slow;
  double e_out = e_slow;
  if (c.driven()) {
    const double omega = drive_frequency(c, packet.energy());
    e_out = std::max(e_slow - omega, 0.25 * e_slow);
  }
  const double v_out = std::sqrt(2.0 * e_out / packet.mass);
  return t_in + units::length_m(200e-9) / v_out;
}

SimulationPlan plan_simulation(const ScenarioConfig& c, double x0_m) {
  c.validate();
  SimulationPlan plan;
  plan.x0_m = x0_m;
  plan.packet = packet_for(c);
  plan.mass = plan.packet.mass;
  plan.omega_in = plan.packet.energy();
  const double omega = drive_frequency(c, plan.omega_in);
  plan.potential = surface_for(c, x0_m, omega);

  const auto& st = c.analysis.stop;
  const double t_geom = default_final_time(c);
  if (st.kind == "fixed") {
    plan.t_final = st.t_final_s > 0.0 ? units::time_s(st.t_final_s) : t_geom;
    plan.stop = FixedTime{plan.t_final};
  } else {
    plan.t_final = st.t_final_s > 0.0 ? units::time_s(st.t_final_s) : 1.5 * t_geom;
    plan.stop = Stationary{st.epsilon, st.window_steps};
  }
  plan.max_steps = st.max_steps;

  const double speed = std::abs(plan.packet.v_mean);
  const double v_in_max = speed * (1.0 + 6.0 * plan.packet.dv_rel);
  double e_max = 0.5 * plan.mass * v_in_max * v_in_max;
  if (omega > 0.0) e_max += static_cast<double>(std::max(c.analysis.n_max, 0)) * omega;

  GridPlanInput in;
  in.packet = plan.packet;
  in.v_floor = potential_floor(plan.potential);
  in.e_max = e_max;
  in.v_out_max = std::sqrt(2.0 * e_max / plan.mass);
  in.omega = plan.potential.is_static() ? 0.0 : omega;
  in.t_final = plan.t_final;
  in.dx_override = units::length_m(c.grid.dx_m);
  in.dt_override = units::time_s(c.grid.dt_s);
  in.x_min_override = units::length_m(c.grid.x_min_m);
  in.x_max_override = units::length_m(c.grid.x_max_m);
  plan.grid = plan_grid(in);

  // Probability that starts inside the interaction region biases R.
  const double edge = plan.potential.x0 + std::abs(plan.potential.d);
  const double inside =
      0.5 * std::erfc((plan.packet.x_center - edge) / (std::sqrt(2.0) * plan.packet.sigma_x()));
  if (inside > 1e-6) {
    std::ostringstream m;
    m << "initial packet has " << inside << " of its probability below x0 + |d|; move particle.x_center_m out";
    warn(m.str());
  }

  plan.x_probe = plan.potential.x0 + plan.potential.d + units::length_m(50e-9);
  plan.fft_padding = c.grid.fft_padding;
  plan.frozen_potential_tol = c.grid.drive_freeze_rel * plan.omega_in;
  plan.n_min = c.analysis.n_min;
  plan.n_max = c.analysis.n_max;
  return plan;
}

TimeDependentRun run_time_dependent(const SimulationPlan& plan, const PropagateOptions& extra) {
  const WaveField initial = gaussian_packet(plan.grid.grid, plan.packet);
  PropagateOptions opts = extra;
  opts.x_probe = plan.x_probe;
  opts.frozen_potential_tol = plan.frozen_potential_tol;
  if (plan.max_steps > 0) opts.max_steps = plan.max_steps;

  TimeDependentRun run;
  run.propagation = propagate(initial, plan.potential, plan.mass, plan.grid.absorber, plan.stop, opts);
  run.spectrum = momentum_spectrum(run.propagation.final, plan.fft_padding);
  run.reflectivity = reflected_probability(run.spectrum);
  if (plan.potential.omega > 0.0) {
    run.z = z_transform(run.spectrum, plan.omega_in, plan.potential.omega, plan.mass);
    run.sidebands = sideband_decompose(*run.z, plan.n_min, plan.n_max);
  }
  return run;
}

double run_stationary(const ScenarioConfig& c, double x0_m) {
  const PacketSpec packet = packet_for(c);
  PotentialParams p = surface_for(c, x0_m, 0.0);
  p.d = 0.0;
  return stationary_reflectivity(std::abs(packet.k_mean()), p, packet.mass).r;
}

Method parse_method(const std::string& name) {
  if (name == "time-dependent") return Method::time_dependent;
  if (name == "stationary") return Method::stationary;
  throw ConfigError("unknown method '" + name + "'", "analysis.methods");
}

std::string method_name(Method m) {
  return m == Method::time_dependent ? "time-dependent" : "stationary";
}

Averaging parse_averaging(const std::string& name) {
  if (name == "double-geometric") return Averaging::double_geometric;
  if (name == "arithmetic") return Averaging::arithmetic;
  throw ConfigError("unknown averaging '" + name + "'", "analysis.averaging");
}

std::vector<double> ReflectivityScan::values() const {
  std::vector<double> v;
  v.reserve(points.size());
  for (const auto& p : points) v.push_back(p.value);
  return v;
}

bool ReflectivityScan::failed() const {
  return std::any_of(points.begin(), points.end(), [](const ScanPoint& p) { return !p.error.empty(); });
}

std::size_t default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

std::vector<std::string> parallel_for(std::size_t n, std::size_t jobs,
                                      const std::function<void(std::size_t)>& fn) {
  std::vector<std::string> errors(n);
  auto guarded = [&](std::size_t i) {
    try {
      fn(i);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      if (errors[i].empty()) errors[i] = "unknown error";
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
    return errors;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) guarded(i);
    });
  }
  pool.clear();  // joins
  return errors;
}

std::vector<std::size_t> find_local_maxima(std::span<const double> v) {
  std::vector<std::size_t> out;
  const std::size_t n = v.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(v[i] > v[i - 1])) continue;
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;
    if (j + 1 < n && v[j + 1] < v[i]) out.push_back(i);
    i = j;
  }
  return out;
}

std::vector<std::size_t> find_local_maxima(const ReflectivityScan& scan) {
  const auto v = scan.values();
  return find_local_maxima(std::span<const double>(v));
}

double average_between_maxima(std::span<const double> values, std::span<const std::size_t> maxima,
                              Averaging how) {
  if (maxima.size() < 2) {
    throw ExtrapolationUnavailable("averaging needs at least two maxima, found " +
                                   std::to_string(maxima.size()));
  }
  std::vector<double> per_interval;
  for (std::size_t m = 0; m + 1 < maxima.size(); ++m) {
    const std::size_t a = maxima[m], b = maxima[m + 1];
    if (!(a < b) || b >= values.size()) throw InternalError("maxima indices must be increasing and in range");
    double lowest = values[a];
    if (b > a + 1) lowest = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(a + 1),
                                              values.begin() + static_cast<std::ptrdiff_t>(b));
    per_interval.push_back(how == Averaging::double_geometric ? std::sqrt(values[a] * lowest)
                                                              : 0.5 * (values[a] + lowest));
  }
  const double count = static_cast<double>(per_interval.size());
  if (how == Averaging::arithmetic) {
    return std::accumulate(per_interval.begin(), per_interval.end(), 0.0) / count;
  }
  double log_sum = 0.0;
  for (double g : per_interval) {
    if (!(g > 0.0)) return 0.0;
    log_sum += std::log(g);
  }
  return std::exp(log_sum / count);
}

double double_geometric_average(const ReflectivityScan& scan) {
  const auto v = scan.values();
  return average_between_maxima(v, scan.maxima_indices, Averaging::double_geometric);
}

namespace {

// Extrapolates one series; series without two maxima fall back to their mean.
double extrapolate_or_mean(const std::vector<double>& series, Averaging how, bool* used_maxima = nullptr) {
  const auto maxima = find_local_maxima(std::span<const double>(series));
  if (used_maxima != nullptr) *used_maxima = maxima.size() >= 2;
  if (maxima.size() >= 2) return average_between_maxima(series, maxima, how);
  return std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
}

}  // namespace

ReflectivityScan scan_x0(const ScenarioConfig& c, std::vector<double> x0_values, Method method,
                         std::size_t jobs, Averaging averaging) {
  std::sort(x0_values.begin(), x0_values.end());
  ReflectivityScan scan;
  scan.points.resize(x0_values.size());
  for (std::size_t i = 0; i < x0_values.size(); ++i) scan.points[i].x0_m = x0_values[i];

  const auto errors = parallel_for(x0_values.size(), jobs, [&](std::size_t i) {
    ScanPoint& pt = scan.points[i];
    if (method == Method::stationary) {
      pt.value = run_stationary(c, pt.x0_m);
      return;
    }
    const TimeDependentRun run = run_time_dependent(plan_simulation(c, pt.x0_m));
    if (run.sidebands) {
      pt.sidebands = run.sidebands;
      pt.value = run.sidebands->r_tot;
    } else {
      pt.value = run.reflectivity;
    }
  });

  std::ostringstream failures;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i].empty()) continue;
    scan.points[i].error = errors[i];
    failures << (failures.tellp() > 0 ? "; " : "") << "x0 = " << scan.points[i].x0_m
             << " m: " << errors[i];
  }
  if (!failures.str().empty()) throw ScanError(failures.str(), std::move(scan));

  scan.maxima_indices = find_local_maxima(scan);
  if (scan.maxima_indices.size() >= 2) {
    scan.extrapolated = average_between_maxima(scan.values(), scan.maxima_indices, averaging);
  }
  if (!scan.points.empty() && scan.points.front().sidebands) {
    double total = 0.0;
    for (int n = c.analysis.n_min; n <= c.analysis.n_max; ++n) {
      std::vector<double> series;
      for (const auto& p : scan.points) series.push_back(p.sidebands->order(n));
      const double r = extrapolate_or_mean(series, averaging);
      scan.extrapolated_orders[n] = r;
      total += r;
    }
    scan.extrapolated_total = total;
  }
  return scan;
}

std::vector<VelocityRow> velocity_sweep(const ScenarioConfig& c, const std::vector<double>& velocities,
                                        std::size_t jobs) {
  if (velocities.empty()) throw ConfigError("velocity list is empty", "analysis.velocities_mps");
  if (!c.driven()) throw ConfigError("velocity sweep needs a drive with d > 0", "drive");
  const Averaging how = parse_averaging(c.analysis.averaging);
  std::vector<VelocityRow> rows;
  for (double v : velocities) {
    VelocityRow row;
    row.v_mps = v;
    try {
      ScenarioConfig cv = c;
      cv.particle.v_mps = v;
      if (c.analysis.stop.t_final_s > 0.0) cv.analysis.stop.t_final_s = c.analysis.stop.t_final_s * c.particle.v_mps / v;
      cv.validate();

      const ReflectivityScan driven = scan_x0(cv, cv.x0_m, Method::time_dependent, jobs, how);
      auto order = [&](int n) {
        auto it = driven.extrapolated_orders.find(n);
        return it == driven.extrapolated_orders.end() ? 0.0 : it->second;
      };
      row.r_m1 = order(-1);
      row.r_0 = order(0);
      row.r_p1 = order(1);
      row.r_tot = driven.extrapolated_total.value_or(0.0);

      ScenarioConfig cs = cv;
      cs.drive.reset();
      const ReflectivityScan stat = scan_x0(cs, cs.x0_m, parse_method(c.analysis.static_method), jobs, how);
      if (!stat.extrapolated) {
        throw ExtrapolationUnavailable("static reference scan has fewer than two maxima");
      }
      row.r_static = *stat.extrapolated;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qrefl
