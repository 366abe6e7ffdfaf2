#include "qrefl/output.hpp"

#include <cstdio>
#include <fstream>

#include "qrefl/errors.hpp"
#include "qrefl/units.hpp"

namespace qrefl::output {

using units::Dimension;

namespace {

double to_si(double v, Dimension d) { return units::from_internal(v, d).value; }

}  // namespace

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string csv_header(const ScenarioConfig& c) {
  return std::string("# ") + kToolVersion + "\n# config: " + to_json(c).dump() + "\n";
}

nlohmann::ordered_json json_document(const ScenarioConfig& c) {
  nlohmann::ordered_json doc;
  doc["header"] = {{"tool", kToolVersion}, {"config", nlohmann::ordered_json::parse(to_json(c).dump())}};
  return doc;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write output file '" + path.string() + "'", "output.directory");
  out << content;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'", "output.directory");
}

std::string coordinate_table(const ScenarioConfig& c, const WaveField& f, std::size_t max_rows) {
  std::string s = csv_header(c) + "x_m,density_per_m\n";
  const std::size_t stride = std::max<std::size_t>(1, (f.psi.size() + max_rows - 1) / max_rows);
  const double a0 = units::atomic_unit_in_si(Dimension::length);
  for (std::size_t i = 0; i < f.psi.size(); i += stride) {
    s += fmt(to_si(f.grid.x(i), Dimension::length)) + "," + fmt(std::norm(f.psi[i]) / a0) + "\n";
  }
  return s;
}

std::string momentum_table(const ScenarioConfig& c, const MomentumSpectrum& sp, double k_abs_max) {
  std::string s = csv_header(c) + "k_per_m,density_m\n";
  const double a0 = units::atomic_unit_in_si(Dimension::length);
  for (std::size_t j = 0; j < sp.k.size(); ++j) {
    if (std::abs(sp.k[j]) > k_abs_max) continue;
    s += fmt(sp.k[j] / a0) + "," + fmt(sp.density[j] * a0) + "\n";
  }
  return s;
}

std::string z_table(const ScenarioConfig& c, const ZDistribution& z, double z_lo, double z_hi) {
  std::string s = csv_header(c) + "z,rho\n";
  for (std::size_t j = 0; j < z.z.size(); ++j) {
    if (z.z[j] < z_lo || z.z[j] > z_hi) continue;
    s += fmt(z.z[j]) + "," + fmt(z.rho[j]) + "\n";
  }
  return s;
}

void append_snapshot(std::ostream& out, const WaveField& f, std::size_t max_rows) {
  const std::size_t stride = std::max<std::size_t>(1, (f.psi.size() + max_rows - 1) / max_rows);
  const double a0 = units::atomic_unit_in_si(Dimension::length);
  const std::string t = fmt(to_si(f.t, Dimension::time));
  for (std::size_t i = 0; i < f.psi.size(); i += stride) {
    out << t << ',' << fmt(to_si(f.grid.x(i), Dimension::length)) << ',' << fmt(std::norm(f.psi[i]) / a0)
        << '\n';
  }
}

nlohmann::ordered_json sideband_json(const SidebandReport& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json orders = nlohmann::ordered_json::object();
  for (const auto& [n, v] : r.orders) orders[std::to_string(n)] = v;
  nlohmann::ordered_json peaks = nlohmann::ordered_json::object();
  for (const auto& [n, z] : r.peak_z) peaks[std::to_string(n)] = z;
  j["orders"] = orders;
  j["peak_z"] = peaks;
  j["R_tot"] = r.r_tot;
  return j;
}

}  // namespace qrefl::output
