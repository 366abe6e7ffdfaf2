#include "qrefl/commands.hpp"

#include <cmath>
#include <sstream>

#include "qrefl/errors.hpp"
#include "qrefl/output.hpp"
#include "qrefl/scan.hpp"
#include "qrefl/stationary.hpp"
#include "qrefl/units.hpp"

namespace qrefl::cli {

using nlohmann::ordered_json;
using output::fmt;

namespace {

std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

ReflectivityScan scan_recording_errors(const ScenarioConfig& c, Method m, std::size_t jobs) {
  try {
    return scan_x0(c, c.x0_m, m, jobs, parse_averaging(c.analysis.averaging));
  } catch (const ScanError& e) {
    return e.partial();
  }
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

std::filesystem::path output_dir(const ScenarioConfig& c) { return c.output.directory; }

ordered_json run_static_scan(const ScenarioConfig& config, std::size_t jobs) {
  ScenarioConfig c = config;
  c.drive.reset();
  c.validate();

  std::vector<Method> methods;
  for (const auto& name : c.analysis.methods) methods.push_back(parse_method(name));

  std::vector<ReflectivityScan> scans;
  for (Method m : methods) scans.push_back(scan_recording_errors(c, m, jobs));

  std::string csv = output::csv_header(c) + "x0_m";
  if (methods.size() == 1) {
    csv += ",R";
  } else {
    for (Method m : methods) csv += ",R_" + std::string(m == Method::time_dependent ? "time_dependent" : "stationary");
  }
  csv += ",errors\n";
  for (std::size_t i = 0; i < c.x0_m.size(); ++i) {
    csv += fmt(scans.front().points[i].x0_m);
    std::string errs;
    for (std::size_t m = 0; m < methods.size(); ++m) {
      const ScanPoint& p = scans[m].points[i];
      csv += "," + (p.error.empty() ? fmt(p.value) : std::string("nan"));
      if (!p.error.empty()) errs += (errs.empty() ? "" : "; ") + method_name(methods[m]) + ": " + p.error;
    }
    csv += "," + (errs.empty() ? std::string() : csv_escape(errs)) + "\n";
  }
  output::write_file(output_dir(c) / "static_scan.csv", csv);

  ordered_json doc = output::json_document(c);
  ordered_json per_method = ordered_json::object();
  std::optional<double> td, st;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const ReflectivityScan& s = scans[m];
    std::optional<double> value = s.failed() ? std::nullopt : s.extrapolated;
    per_method[method_name(methods[m])] = {{"extrapolated", optional_number(value)},
                                           {"maxima_indices", s.maxima_indices},
                                           {"failed_points", s.failed()}};
    (methods[m] == Method::time_dependent ? td : st) = value;
  }
  doc["methods"] = per_method;
  doc["relative_deviation"] = td && st && *st != 0.0 ? ordered_json(std::abs(*td - *st) / *st) : ordered_json(nullptr);
  output::write_file(output_dir(c) / "static_extrapolation.json", doc.dump(2) + "\n");
  return doc;
}

ordered_json run_driven(const ScenarioConfig& c, std::size_t jobs) {
  c.validate();
  if (!c.driven()) throw ConfigError("driven run needs a drive block with d_m > 0", "drive.d_m");
  const SimulationPlan plan = plan_simulation(c, c.x0_m.front());
  if (!(plan.potential.omega > 0.0)) throw ConfigError("driven run needs omega > 0", "drive");

  std::ostringstream snapshots;
  PropagateOptions extra;
  if (c.output.snapshot_every > 0) {
    snapshots << output::csv_header(c) << "t_s,x_m,density_per_m\n";
    extra.snapshot_every = c.output.snapshot_every;
    extra.on_snapshot = [&snapshots](const WaveField& f) { output::append_snapshot(snapshots, f); };
  }
  const TimeDependentRun run = run_time_dependent(plan, extra);
  const auto dir = output_dir(c);
  if (c.output.snapshot_every > 0) output::write_file(dir / "snapshots.csv", snapshots.str());

  output::write_file(dir / "coordinate_density.csv", output::coordinate_table(c, run.propagation.final));
  const double e_top = plan.omega_in + static_cast<double>(std::max(plan.n_max, 0) + 1) * plan.potential.omega;
  const double k_top = 1.5 * std::sqrt(2.0 * plan.mass * e_top);
  output::write_file(dir / "momentum_density.csv", output::momentum_table(c, run.spectrum, k_top));
  output::write_file(dir / "z_density.csv",
                     output::z_table(c, *run.z, plan.n_min - 1.0, plan.n_max + 1.0));

  ordered_json doc = output::json_document(c);
  doc["x0_m"] = plan.x0_m;
  doc["omega_over_omega_in"] = plan.potential.omega / plan.omega_in;
  doc["sidebands"] = output::sideband_json(*run.sidebands);
  doc["reflected_probability"] = run.reflectivity;
  doc["absorbed_norm"] = run.propagation.absorbed_norm;
  doc["steps"] = run.propagation.steps;
  output::write_file(dir / "sidebands.json", doc.dump(2) + "\n");

  if (c.x0_m.size() > 1) {
    const ReflectivityScan scan = scan_recording_errors(c, Method::time_dependent, jobs);
    std::string csv = output::csv_header(c) + "x0_m,R_m1,R_0,R_p1,R_tot,errors\n";
    for (const auto& p : scan.points) {
      if (p.error.empty() && p.sidebands) {
        const auto& s = *p.sidebands;
        csv += fmt(p.x0_m) + "," + fmt(s.order(-1)) + "," + fmt(s.order(0)) + "," + fmt(s.order(1)) + "," +
               fmt(s.r_tot) + ",\n";
      } else {
        csv += fmt(p.x0_m) + ",nan,nan,nan,nan," + csv_escape(p.error) + "\n";
      }
    }
    output::write_file(dir / "driven_scan.csv", csv);
    ordered_json ex = output::json_document(c);
    ordered_json orders = ordered_json::object();
    for (const auto& [n, r] : scan.extrapolated_orders) orders[std::to_string(n)] = r;
    ex["failed_points"] = scan.failed();
    ex["extrapolated_orders"] = orders;
    ex["extrapolated_total"] = optional_number(scan.extrapolated_total);
    output::write_file(dir / "driven_extrapolation.json", ex.dump(2) + "\n");
    doc["scan"] = ex;
  }
  return doc;
}

std::string run_velocity_sweep(const ScenarioConfig& c, const std::vector<double>& velocities_in,
                               std::size_t jobs) {
  c.validate();
  const std::vector<double>& velocities = velocities_in.empty() ? c.analysis.velocities_mps : velocities_in;
  if (velocities.empty()) throw ConfigError("velocity list is empty", "analysis.velocities_mps");
  const auto rows = velocity_sweep(c, velocities, jobs);
  std::string csv = output::csv_header(c) + "v_mps,R_m1,R_0,R_p1,R_tot,R_static,errors\n";
  for (const auto& r : rows) {
    csv += fmt(r.v_mps) + "," + fmt(r.r_m1) + "," + fmt(r.r_0) + "," + fmt(r.r_p1) + "," + fmt(r.r_tot) + "," +
           fmt(r.r_static) + "," + (r.error.empty() ? std::string() : csv_escape(r.error)) + "\n";
  }
  output::write_file(output_dir(c) / "velocity_sweep.csv", csv);
  return csv;
}

ordered_json stationary_query(const ScenarioConfig& c, std::optional<double> v_mps, std::optional<double> x0_m) {
  c.validate();
  const double mass = units::mass_u(c.particle.mass_u);
  const double k = mass * units::velocity_mps(v_mps.value_or(c.particle.v_mps));
  PotentialParams p{units::c4_eVA4(c.surface.c4_eVA4), units::length_m(c.surface.l_A * units::angstrom),
                    units::length_m(x0_m.value_or(c.x0_m.front()))};
  const ScatteringSolution s = stationary_reflectivity(k, p, mass);
  const double a0 = units::atomic_unit_in_si(units::Dimension::length);
  ordered_json j;
  j["tool"] = kToolVersion;
  j["v_mps"] = v_mps.value_or(c.particle.v_mps);
  j["x0_m"] = x0_m.value_or(c.x0_m.front());
  j["k_per_m"] = k / a0;
  j["R"] = s.r;
  j["A"] = {s.a.real(), s.a.imag()};
  j["B"] = {s.b.real(), s.b.imag()};
  j["flux_defect"] = s.flux_defect();
  j["x_i_m"] = s.x_i * a0;
  j["x_f_m"] = s.x_f * a0;
  j["rk_steps"] = s.steps;
  return j;
}

ordered_json error_json(const std::exception& e) {
  ordered_json j;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["error"] = err->kind();
  } else {
    j["error"] = "internal";
  }
  j["message"] = e.what();
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e); ce != nullptr && !ce->field().empty()) {
    j["field"] = ce->field();
  }
  return j;
}

}  // namespace qrefl::cli
