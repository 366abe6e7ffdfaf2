#include "qrefl/potential.hpp"

#include <cmath>
#include <sstream>

#include "qrefl/errors.hpp"
#include "qrefl/units.hpp"

namespace qrefl {

void PotentialParams::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(std::string(field) + " " + what, field);
  };
  require(std::isfinite(c4) && c4 > 0.0, "surface.C4", "must be > 0");
  require(std::isfinite(l) && l > 0.0, "surface.l", "must be > 0");
  require(std::isfinite(x0) && x0 > 0.0, "regularization.x0", "must be > 0");
  require(std::isfinite(d) && d >= 0.0, "drive.d", "must be >= 0");
  require(std::isfinite(omega) && omega >= 0.0, "drive.omega", "must be >= 0");
}

PotentialParams default_surface(double x0, double d, double omega) {
  return PotentialParams{units::c4_eVA4(23.25), units::length_m(93.0 * units::angstrom), x0, d,
                         omega};
}

double casimir_vdw(double x, const PotentialParams& p) {
  if (!(x > 0.0)) {
    std::ostringstream msg;
    msg << "casimir_vdw evaluated at x = " << x << " (requires x > 0)";
    throw DomainError(msg.str());
  }
  return -p.c4 / (x * x * x * (x + p.l));
}

double casimir_vdw_derivative(double x, const PotentialParams& p) {
  if (!(x > 0.0)) throw DomainError("casimir_vdw_derivative requires x > 0");
  const double xl = x + p.l;
  const double x2 = x * x;
  return p.c4 * (4.0 * x + 3.0 * p.l) / (x2 * x2 * xl * xl);
}

double potential_floor(const PotentialParams& p) {
  return casimir_vdw(p.x0, p) - 0.5 * casimir_vdw_derivative(p.x0, p) * p.x0;
}

namespace {

// Branch coefficients for one x0, so grid sampling does not re-derive them.
struct Continuation {
  double x0, v0, slope, curvature, floor;

  explicit Continuation(const PotentialParams& p)
      : x0(p.x0),
        v0(casimir_vdw(p.x0, p)),
        slope(casimir_vdw_derivative(p.x0, p)),
        curvature(slope / (2.0 * p.x0)),
        floor(v0 - 0.5 * slope * p.x0) {}

  double operator()(double x, const PotentialParams& p) const {
    if (x > x0) return casimir_vdw(x, p);
    if (x >= 0.0) {
      const double u = x - x0;
      return v0 + slope * u + curvature * u * u;
    }
    return floor;
  }
};

}  // namespace

double continued_potential(double x, const PotentialParams& p) { return Continuation(p)(x, p); }

double surface_shift(double t, const PotentialParams& p) {
  if (p.d == 0.0) return 0.0;
  return p.d * std::sin(p.omega * t);
}

double oscillating_potential(double x, double t, const PotentialParams& p) {
  return continued_potential(x - surface_shift(t, p), p);
}

void sample_potential(double x_min, double dx, double t, const PotentialParams& p,
                      std::span<double> out, std::size_t first) {
  const Continuation cont(p);
  const double shift = surface_shift(t, p);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = cont(x_min + static_cast<double>(first + i) * dx - shift, p);
  }
}

}  // namespace qrefl
