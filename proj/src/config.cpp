#include "qrefl/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "qrefl/errors.hpp"

namespace qrefl {

using nlohmann::json;

namespace {

// Reads `key` from `obj` into `out` when present; reports type errors with the full path.
template <class T>
void read(const json& obj, const std::string& path, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value: ") + e.what(), path + "." + key);
  }
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
  if (!obj.is_object()) throw ConfigError("expected an object", path);
  std::set<std::string> ok(known.begin(), known.end());
  for (const auto& [k, v] : obj.items()) {
    if (!ok.count(k)) throw ConfigError("unknown key '" + k + "'", path.empty() ? k : path + "." + k);
  }
}

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("must be > 0", field);
}

}  // namespace

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

void ScenarioConfig::validate() const {
  require_positive(particle.mass_u, "particle.mass_u");
  require_positive(particle.v_mps, "particle.v_mps");
  if (!(particle.dv_rel > 0.0 && particle.dv_rel < 1.0))
    throw ConfigError("must lie in (0, 1)", "particle.dv_rel");
  require_positive(particle.x_center_m, "particle.x_center_m");
  require_positive(surface.c4_eVA4, "surface.C4_eVA4");
  require_positive(surface.l_A, "surface.l_A");
  if (x0_m.empty()) throw ConfigError("at least one connection point is required", "regularization.x0_m");
  for (double x : x0_m) require_positive(x, "regularization.x0_m");
  if (!std::is_sorted(x0_m.begin(), x0_m.end()))
    throw ConfigError("connection points must be sorted ascending", "regularization.x0_m");
  if (drive) {
    if (!(drive->d_m >= 0.0)) throw ConfigError("must be >= 0", "drive.d_m");
    if (drive->omega_radps && drive->omega_ratio)
      throw ConfigError("omega_radps and omega_ratio are mutually exclusive", "drive");
    if (drive->omega_radps && !(*drive->omega_radps >= 0.0))
      throw ConfigError("must be >= 0", "drive.omega_radps");
    if (drive->omega_ratio && !(*drive->omega_ratio >= 0.0))
      throw ConfigError("must be >= 0", "drive.omega_ratio");
  }
  if (grid.dx_m < 0.0) throw ConfigError("must be >= 0", "grid.dx_m");
  if (grid.dt_s < 0.0) throw ConfigError("must be >= 0", "grid.dt_s");
  if (grid.x_min_m > 0.0) throw ConfigError("must be < 0 (0 selects the default)", "grid.x_min_m");
  if (grid.x_max_m < 0.0) throw ConfigError("must be > 0 (0 selects the default)", "grid.x_max_m");
  if (grid.fft_padding == 0) throw ConfigError("must be >= 1", "grid.fft_padding");
  if (!(grid.drive_freeze_rel >= 0.0 && grid.drive_freeze_rel < 1e-3))
    throw ConfigError("must be in [0, 1e-3)", "grid.drive_freeze_rel");
  if (analysis.n_min > 0 || analysis.n_max < 0)
    throw ConfigError("sideband range must satisfy n_min <= 0 <= n_max", "analysis");
  const auto& st = analysis.stop;
  if (st.kind != "fixed" && st.kind != "stationary")
    throw ConfigError("must be 'fixed' or 'stationary'", "analysis.stop.kind");
  if (!(st.t_final_s >= 0.0)) throw ConfigError("must be >= 0", "analysis.stop.t_final_s");
  if (!(st.epsilon > 0.0)) throw ConfigError("must be > 0", "analysis.stop.epsilon");
  if (analysis.methods.empty()) throw ConfigError("at least one method is required", "analysis.methods");
  for (const auto& m : analysis.methods) {
    if (m != "time-dependent" && m != "stationary")
      throw ConfigError("unknown method '" + m + "'", "analysis.methods");
  }
  if (analysis.static_method != "time-dependent" && analysis.static_method != "stationary")
    throw ConfigError("unknown method '" + analysis.static_method + "'", "analysis.static_method");
  if (analysis.averaging != "double-geometric" && analysis.averaging != "arithmetic")
    throw ConfigError("must be 'double-geometric' or 'arithmetic'", "analysis.averaging");
  for (double v : analysis.velocities_mps) require_positive(v, "analysis.velocities_mps");
}

ScenarioConfig parse_config(const json& j) {
  ScenarioConfig c;
  reject_unknown(j, "", {"particle", "surface", "regularization", "drive", "grid", "analysis", "output"});

  if (j.contains("particle")) {
    const auto& p = j.at("particle");
    reject_unknown(p, "particle", {"mass_u", "v_mps", "dv_rel", "x_center_m"});
    read(p, "particle", "mass_u", c.particle.mass_u);
    read(p, "particle", "v_mps", c.particle.v_mps);
    read(p, "particle", "dv_rel", c.particle.dv_rel);
    read(p, "particle", "x_center_m", c.particle.x_center_m);
  }
  if (j.contains("surface")) {
    const auto& s = j.at("surface");
    reject_unknown(s, "surface", {"C4_eVA4", "l_A"});
    read(s, "surface", "C4_eVA4", c.surface.c4_eVA4);
    read(s, "surface", "l_A", c.surface.l_A);
  }
  if (j.contains("regularization")) {
    const auto& r = j.at("regularization");
    reject_unknown(r, "regularization", {"x0_m", "x0_range_m"});
    if (r.contains("x0_m") && r.contains("x0_range_m"))
      throw ConfigError("give either x0_m or x0_range_m", "regularization");
    read(r, "regularization", "x0_m", c.x0_m);
    if (r.contains("x0_range_m")) {
      const auto& rg = r.at("x0_range_m");
      reject_unknown(rg, "regularization.x0_range_m", {"min", "max", "count"});
      double lo = 0.0, hi = 0.0;
      std::size_t n = 0;
      read(rg, "regularization.x0_range_m", "min", lo);
      read(rg, "regularization.x0_range_m", "max", hi);
      read(rg, "regularization.x0_range_m", "count", n);
      if (n == 0) throw ConfigError("must be >= 1", "regularization.x0_range_m.count");
      if (!(hi >= lo)) throw ConfigError("max must be >= min", "regularization.x0_range_m");
      c.x0_m = linspace(lo, hi, n);
    }
  }
  if (j.contains("drive") && !j.at("drive").is_null()) {
    const auto& d = j.at("drive");
    reject_unknown(d, "drive", {"d_m", "omega_radps", "omega_ratio"});
    ScenarioConfig::Drive drive;
    read(d, "drive", "d_m", drive.d_m);
    if (d.contains("omega_radps")) {
      double w = 0.0;
      read(d, "drive", "omega_radps", w);
      drive.omega_radps = w;
    }
    if (d.contains("omega_ratio")) {
      double w = 0.0;
      read(d, "drive", "omega_ratio", w);
      drive.omega_ratio = w;
    }
    if (!drive.omega_radps && !drive.omega_ratio) drive.omega_ratio = 0.5;
    c.drive = drive;
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown(g, "grid", {"dx_m", "dt_s", "x_min_m", "x_max_m", "fft_padding", "drive_freeze_rel"});
    read(g, "grid", "dx_m", c.grid.dx_m);
    read(g, "grid", "dt_s", c.grid.dt_s);
    read(g, "grid", "x_min_m", c.grid.x_min_m);
    read(g, "grid", "x_max_m", c.grid.x_max_m);
    read(g, "grid", "fft_padding", c.grid.fft_padding);
    read(g, "grid", "drive_freeze_rel", c.grid.drive_freeze_rel);
  }
  if (j.contains("analysis")) {
    const auto& a = j.at("analysis");
    reject_unknown(a, "analysis",
                   {"n_min", "n_max", "stop", "methods", "velocities_mps", "static_method", "averaging"});
    read(a, "analysis", "n_min", c.analysis.n_min);
    read(a, "analysis", "n_max", c.analysis.n_max);
    read(a, "analysis", "methods", c.analysis.methods);
    read(a, "analysis", "velocities_mps", c.analysis.velocities_mps);
    read(a, "analysis", "static_method", c.analysis.static_method);
    read(a, "analysis", "averaging", c.analysis.averaging);
    if (a.contains("stop")) {
      const auto& s = a.at("stop");
      reject_unknown(s, "analysis.stop", {"kind", "t_final_s", "epsilon", "window_steps", "max_steps"});
      read(s, "analysis.stop", "kind", c.analysis.stop.kind);
      read(s, "analysis.stop", "t_final_s", c.analysis.stop.t_final_s);
      read(s, "analysis.stop", "epsilon", c.analysis.stop.epsilon);
      read(s, "analysis.stop", "window_steps", c.analysis.stop.window_steps);
      read(s, "analysis.stop", "max_steps", c.analysis.stop.max_steps);
    }
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    reject_unknown(o, "output", {"directory", "formats", "snapshot_every"});
    read(o, "output", "directory", c.output.directory);
    read(o, "output", "formats", c.output.formats);
    read(o, "output", "snapshot_every", c.output.snapshot_every);
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", "");
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "");
  }
  return parse_config(j);
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["particle"] = {{"mass_u", c.particle.mass_u},
                   {"v_mps", c.particle.v_mps},
                   {"dv_rel", c.particle.dv_rel},
                   {"x_center_m", c.particle.x_center_m}};
  j["surface"] = {{"C4_eVA4", c.surface.c4_eVA4}, {"l_A", c.surface.l_A}};
  j["regularization"] = {{"x0_m", c.x0_m}};
  if (c.drive) {
    json d = {{"d_m", c.drive->d_m}};
    if (c.drive->omega_radps) d["omega_radps"] = *c.drive->omega_radps;
    if (c.drive->omega_ratio) d["omega_ratio"] = *c.drive->omega_ratio;
    j["drive"] = d;
  } else {
    j["drive"] = nullptr;
  }
  j["grid"] = {{"dx_m", c.grid.dx_m},
               {"dt_s", c.grid.dt_s},
               {"x_min_m", c.grid.x_min_m},
               {"x_max_m", c.grid.x_max_m},
               {"fft_padding", c.grid.fft_padding},
               {"drive_freeze_rel", c.grid.drive_freeze_rel}};
  const auto& st = c.analysis.stop;
  j["analysis"] = {{"n_min", c.analysis.n_min},
                   {"n_max", c.analysis.n_max},
                   {"stop",
                    {{"kind", st.kind},
                     {"t_final_s", st.t_final_s},
                     {"epsilon", st.epsilon},
                     {"window_steps", st.window_steps},
                     {"max_steps", st.max_steps}}},
                   {"methods", c.analysis.methods},
                   {"velocities_mps", c.analysis.velocities_mps},
                   {"static_method", c.analysis.static_method},
                   {"averaging", c.analysis.averaging}};
  j["output"] = {{"directory", c.output.directory},
                 {"formats", c.output.formats},
                 {"snapshot_every", c.output.snapshot_every}};
  return j;
}

}  // namespace qrefl
