#include "qrefl/grid_packet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qrefl/errors.hpp"

namespace qrefl {

GridSpec GridSpec::uniform(double x_min, double x_max, std::size_t n_points, double dt) {
  GridSpec g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n_points = n_points;
  g.dt = dt;
  g.dx = n_points > 1 ? (x_max - x_min) / static_cast<double>(n_points - 1) : 0.0;
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (!(x_min < 0.0 && 0.0 < x_max)) throw ConfigError("grid requires x_min < 0 < x_max", "grid");
  if (n_points < 4 || n_points % 2 != 0)
    throw ConfigError("grid point count must be even and >= 4", "grid.n_points");
  if (!(dx > 0.0)) throw ConfigError("grid spacing must be positive", "grid.dx");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive", "grid.dt");
}

double WaveField::norm() const {
  double s = 0.0;
  for (const auto& z : psi) s += std::norm(z);
  return s * grid.dx;
}

double WaveField::norm_above(double x_lo) const {
  const double offset = std::ceil((x_lo - grid.x_min) / grid.dx);
  std::size_t first = offset <= 0.0 ? 0 : static_cast<std::size_t>(offset);
  double s = 0.0;
  for (std::size_t i = first; i < psi.size(); ++i) s += std::norm(psi[i]);
  return s * grid.dx;
}

double WaveField::centroid_above(double x_lo) const {
  const double offset = std::ceil((x_lo - grid.x_min) / grid.dx);
  std::size_t first = offset <= 0.0 ? 0 : static_cast<std::size_t>(offset);
  double s = 0.0, sx = 0.0;
  for (std::size_t i = first; i < psi.size(); ++i) {
    const double w = std::norm(psi[i]);
    s += w;
    sx += w * grid.x(i);
  }
  return s > 0.0 ? sx / s : 0.0;
}

void PacketSpec::validate() const {
  if (!(std::abs(v_mean) > 0.0)) throw ConfigError("packet mean velocity must be non-zero", "particle.v_mps");
  if (!(dv_rel > 0.0 && dv_rel < 1.0))
    throw ConfigError("relative velocity spread must lie in (0, 1)", "particle.dv_rel");
  if (!(mass > 0.0)) throw ConfigError("particle mass must be positive", "particle.mass_u");
}

double PacketSpec::sigma_k() const { return dv_rel * std::abs(k_mean()); }

void AbsorberSpec::validate() const {
  if (!(sigma > 0.0)) throw ConfigError("absorber sigma must be positive", "grid.absorber");
  if (!(x_b < a && a < 0.0)) throw ConfigError("absorber requires x_b < a < 0", "grid.absorber");
}

double AbsorberSpec::operator()(double x) const { return 1.0 / (std::exp(-(x - a) / sigma) + 1.0); }

WaveField gaussian_packet(const GridSpec& g, const PacketSpec& s) {
  g.validate();
  s.validate();
  const double sx = s.sigma_x();
  if (!(s.x_center - 5.0 * sx > g.x_min && s.x_center + 5.0 * sx < g.x_max)) {
    std::ostringstream msg;
    msg << "packet [x_center +- 5 sigma_x] = [" << s.x_center - 5.0 * sx << ", "
        << s.x_center + 5.0 * sx << "] is not contained in the box [" << g.x_min << ", "
        << g.x_max << "]";
    throw ConfigError(msg.str(), "particle.x_center_m");
  }
  WaveField f{g, std::vector<cplx>(g.n_points), 0.0};
  const double k = s.k_mean();
  const double inv4s2 = 1.0 / (4.0 * sx * sx);
  for (std::size_t i = 0; i < g.n_points; ++i) {
    const double u = g.x(i) - s.x_center;
    f.psi[i] = std::exp(-u * u * inv4s2) * std::polar(1.0, k * u);
  }
  const double scale = 1.0 / std::sqrt(f.norm());
  for (auto& z : f.psi) z *= scale;
  return f;
}

AbsorberSpec calibrate_absorber(double x_b) {
  if (!(x_b < 0.0)) throw ConfigError("absorber edge x_b must be negative", "grid.x_min_m");
  AbsorberSpec a{2.0 * x_b / 3.0, -x_b / (3.0 * std::log(1e8)), x_b};
  a.validate();
  return a;
}

std::vector<double> damping_mask(const GridSpec& g, const AbsorberSpec& a) {
  std::vector<double> f(g.n_points);
  for (std::size_t i = 0; i < g.n_points; ++i) f[i] = a(g.x(i));
  return f;
}

std::size_t fft_friendly_size(std::size_t n) {
  auto smooth = [](std::size_t m) {
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (m % p == 0) m /= p;
    return m == 1;
  };
  std::size_t m = std::max<std::size_t>(n, 4);
  if (m % 2) ++m;
  while (!smooth(m)) m += 2;
  return m;
}

GridPlan plan_grid(const GridPlanInput& in) {
  const PacketSpec& p = in.packet;
  p.validate();
  if (!(in.e_max > 0.0)) throw ConfigError("grid planning needs a positive kinetic energy", "grid");
  if (!(in.t_final > 0.0)) throw ConfigError("grid planning needs a positive final time", "analysis.stop");

  const double sx = p.sigma_x();
  const double deep_kinetic = in.e_max - std::min(in.v_floor, 0.0);
  const double k_deep = std::sqrt(2.0 * p.mass * deep_kinetic);
  const double lambda_min = 2.0 * std::numbers::pi / k_deep;
  const double dx_target = in.dx_override > 0.0 ? in.dx_override : lambda_min / 20.0;

  const double speed = std::abs(p.v_mean);
  const double v_in_max = speed * (1.0 + 6.0 * p.dv_rel);
  const double v_out = in.v_out_max > 0.0 ? in.v_out_max : v_in_max;
  const double closest_start = std::max(p.x_center - 6.0 * sx, 0.0);
  const double front = v_out * in.t_final - closest_start * v_out / v_in_max;
  double x_max = in.x_max_override > 0.0 ? in.x_max_override
                                         : std::max(p.x_center + 6.0 * sx, front) + sx;

  double x_min = in.x_min_override < 0.0 ? in.x_min_override
                                          : std::min(-0.3 * x_max, p.x_center - 5.5 * sx);

  const std::size_t n = fft_friendly_size(
      static_cast<std::size_t>(std::ceil((x_max - x_min) / dx_target)) + 1);

  double dt = in.dt_override;
  if (!(dt > 0.0)) {
    const double v_deep = k_deep / p.mass;
    const double absorber_width = -x_min / 3.0;
    dt = absorber_width / (10.0 * v_deep);
    dt = std::min(dt, 0.02 / in.e_max);
    if (in.omega > 0.0) dt = std::min(dt, 0.02 / in.omega);
  }

  GridPlan plan{GridSpec::uniform(x_min, x_max, n, dt), calibrate_absorber(x_min)};
  return plan;
}

}  // namespace qrefl
