#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qrefl {

using cplx = std::complex<double>;

/// Uniform grid on [x_min, x_max] with an even number of points, plus the
/// propagation time step. Atomic units.
struct GridSpec {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n_points = 0;
  double dx = 0.0;
  double dt = 0.0;

  /// Validating constructor; dx = (x_max - x_min) / (n_points - 1).
  static GridSpec uniform(double x_min, double x_max, std::size_t n_points, double dt);

  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
  void validate() const;
};

struct WaveField {
  GridSpec grid;
  std::vector<cplx> psi;
  double t = 0.0;

  /// sum |psi_i|^2 dx
  double norm() const;
  /// sum |psi_i|^2 dx restricted to x_i > x_lo
  double norm_above(double x_lo) const;
  /// <x> over x_i > x_lo, normalised by norm_above(x_lo); 0 when empty.
  double centroid_above(double x_lo) const;
};

/// Minimum-uncertainty Gaussian launched with mean velocity `v_mean`
/// (negative = towards the surface) and relative velocity spread `dv_rel`.
struct PacketSpec {
  double x_center;
  double v_mean;
  double dv_rel;
  double mass;

  void validate() const;
  double k_mean() const { return mass * v_mean; }
  double sigma_k() const;
  double sigma_x() const { return 0.5 / sigma_k(); }
  /// Kinetic energy at the mean velocity, i.e. hbar * omega_in.
  double energy() const { return 0.5 * mass * v_mean * v_mean; }
};

/// Logistic damping mask f(x) = 1 / (exp(-(x - a) / sigma) + 1).
struct AbsorberSpec {
  double a;
  double sigma;
  double x_b;

  void validate() const;
  double operator()(double x) const;
};

WaveField gaussian_packet(const GridSpec& g, const PacketSpec& s);

/// Chooses a and sigma so that f(x_b) = 1e-8 and |f(0) - 1| <= 1e-16,
/// which gives a = 2 x_b / 3 and sigma = -x_b / (3 ln 1e8).
AbsorberSpec calibrate_absorber(double x_b);

std::vector<double> damping_mask(const GridSpec& g, const AbsorberSpec& a);

/// Inputs to the automatic discretisation rules. Every override is used
/// verbatim when positive (x_min: when negative).
struct GridPlanInput {
  PacketSpec packet;
  double v_floor = 0.0;      ///< depth of the continued potential (<= 0)
  double e_max = 0.0;        ///< highest kinetic energy of interest far from the surface
  double v_out_max = 0.0;    ///< fastest outgoing speed after reflection
  double omega = 0.0;        ///< drive frequency, 0 when static
  double t_final = 0.0;
  double dx_override = 0.0;
  double dt_override = 0.0;
  double x_min_override = 0.0;
  double x_max_override = 0.0;
};

struct GridPlan {
  GridSpec grid;
  AbsorberSpec absorber;
};

/// Discretisation rules:
///  - dx <= lambda_min / 20, lambda_min the shortest local wavelength over
///    the box (kinetic energy e_max + |v_floor|);
///  - x_max beyond the reflected front at t_final and beyond x_center + 6 sigma_x;
///  - x_b = -0.3 x_max (or further out to contain the initial packet);
///  - dt keeps the transmitted wave >= 10 steps inside the absorber and
///    dt * e_max, dt * omega <= 0.02;
///  - n_points rounded up to an even 2^a 3^b 5^c 7^d.
GridPlan plan_grid(const GridPlanInput& in);

/// Smallest even integer >= max(n, 4) with no prime factor above 7.
std::size_t fft_friendly_size(std::size_t n);

}  // namespace qrefl
