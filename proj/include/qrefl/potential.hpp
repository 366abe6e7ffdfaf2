#pragma once

#include <span>

namespace qrefl {

/// Surface interaction parameters, Hartree atomic units throughout.
///
/// The surface sits at x = 0 with the atom approaching from x > 0. The raw
/// Casimir-van der Waals form is cut at `x0` and continued smoothly towards
/// x -> -infinity. A non-zero `d` together with `omega` makes the whole
/// continued potential oscillate rigidly: W(x, t) = V_cont(x - d sin(omega t)).
struct PotentialParams {
  double c4;          ///< energy * length^4, > 0
  double l;           ///< reduced transition wavelength, > 0
  double x0;          ///< connection point, > 0
  double d = 0.0;     ///< oscillation amplitude, >= 0
  double omega = 0.0; ///< angular drive frequency, >= 0

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  /// A run is static when the surface does not move at all.
  bool is_static() const { return d == 0.0 || omega == 0.0; }
};

/// Defaults for helium near silicon: C4 = 23.25 eV A^4, l = 93 A.
PotentialParams default_surface(double x0, double d = 0.0, double omega = 0.0);

/// -C4 / (x^3 (x + l)); throws DomainError for x <= 0.
double casimir_vdw(double x, const PotentialParams& p);

/// Analytic dV/dx = C4 (4x + 3l) / (x^4 (x + l)^2); x > 0.
double casimir_vdw_derivative(double x, const PotentialParams& p);

/// Value of the constant branch (x < 0), which is also the global minimum
/// of the continued potential.
double potential_floor(const PotentialParams& p);

/// Piecewise continuation: raw potential above x0, a parabola matching value
/// and slope at x0 with zero slope at x = 0, constant below 0.
double continued_potential(double x, const PotentialParams& p);

/// continued_potential(x - d sin(omega t)).
double oscillating_potential(double x, double t, const PotentialParams& p);

/// Surface displacement d sin(omega t) at time t.
double surface_shift(double t, const PotentialParams& p);

/// Samples W(x_min + (first + i) dx, t) into `out`.
void sample_potential(double x_min, double dx, double t, const PotentialParams& p,
                      std::span<double> out, std::size_t first = 0);

}  // namespace qrefl
