#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "qrefl/grid_packet.hpp"

namespace qrefl {

/// psi(k) = dx / sqrt(2 pi) * sum_n psi(x_n) exp(-i k x_n), on the FFT grid
/// k_j = 2 pi j / (M dx) sorted ascending, M = padding * n_points.
/// sum density * dk equals the field norm (Parseval).
struct MomentumSpectrum {
  std::vector<double> k;
  std::vector<cplx> amplitude;
  std::vector<double> density;
  double dk = 0.0;
  // Needed to invert the transform.
  double x_min = 0.0;
  double dx = 0.0;
  std::size_t n_source = 0;

  double total() const;
  /// <k> weighted by density.
  double mean_k() const;
};

/// `padding` > 1 zero-pads the field, refining dk without changing the
/// underlying transform.
MomentumSpectrum momentum_spectrum(const WaveField& field, std::size_t padding = 1);

/// Inverse of momentum_spectrum on the original grid.
std::vector<cplx> inverse_spectrum(const MomentumSpectrum& spec);

/// sum density * dk over k_lo <= k < k_hi. Requires k_lo >= 0; an empty
/// interval yields 0 and a warning.
double reflectivity(const MomentumSpectrum& spec, double k_lo, double k_hi);

/// Probability carried by k > 0 (reflected, outgoing) components.
double reflected_probability(const MomentumSpectrum& spec);

/// Distribution over z = (k^2/2m - omega_in) / omega built from k > 0 bins.
/// Each sample keeps its measure dz = k dk / (m omega), so
/// sum rho * dz equals the k > 0 probability exactly.
struct ZDistribution {
  std::vector<double> z;
  std::vector<double> rho;
  std::vector<double> dz;
  double omega_in = 0.0;
  double omega = 0.0;

  double integral() const;
};

ZDistribution z_transform(const MomentumSpectrum& spec, double omega_in, double omega, double mass);

struct SidebandReport {
  std::map<int, double> orders;  ///< n -> R_n
  std::map<int, double> peak_z;  ///< n -> located peak, only where R_n > floor
  double r_tot = 0.0;

  double order(int n) const {
    auto it = orders.find(n);
    return it == orders.end() ? 0.0 : it->second;
  }
};

inline constexpr double kPeakFloor = 1e-12;

/// R_n integrates rho over [n - 1/2, n + 1/2) for n_min <= n <= n_max.
SidebandReport sideband_decompose(const ZDistribution& zd, int n_min, int n_max);

/// Vertex of the parabola through three (x, y) points; falls back to x1
/// when the points are not strictly concave.
double parabolic_peak(double x0, double y0, double x1, double y1, double x2, double y2);

}  // namespace qrefl
