#pragma once

#include <functional>
#include <vector>

#include "qrefl/grid_packet.hpp"
#include "qrefl/potential.hpp"

namespace qrefl {

/// Plane-wave matching result. The transmitted wave at x_i is
/// exp(-i k_inner x) with unit amplitude; at x_f the solution is
/// A exp(ikx) + B exp(-ikx), so R = |A/B|^2 and flux balance reads
/// k |B|^2 = k |A|^2 + k_inner.
struct ScatteringSolution {
  double k = 0.0;
  double k_inner = 0.0;
  cplx a{};  ///< outgoing (reflected) amplitude
  cplx b{};  ///< incoming amplitude
  double r = 0.0;
  double x_i = 0.0;
  double x_f = 0.0;
  std::size_t steps = 0;

  /// |k |B|^2 - k |A|^2 - k_inner| / (k |B|^2)
  double flux_defect() const;
};

struct OdeTolerances {
  double atol = 1e-12;
  double rtol = 1e-10;
  std::size_t max_steps = 20'000'000;
};

/// Adaptive Dormand-Prince 5(4) integration of y' = f(x, y) for a complex
/// 2-vector, with PI step-size control. Integrates across `breakpoints`
/// (sorted, inside (x_start, x_end)) without stepping over them.
/// Throws IntegrationFailure when the step budget runs out.
struct OdeState {
  cplx y0, y1;
};
OdeState integrate_dopri5(const std::function<OdeState(double, const OdeState&)>& rhs,
                          OdeState y, double x_start, double x_end,
                          const std::vector<double>& breakpoints, const OdeTolerances& tol,
                          std::size_t* steps_taken = nullptr);

/// Scattering off an arbitrary potential that is constant (`v_left`) for
/// x <= x_i and negligible at x_f.
ScatteringSolution integrate_scattering(double k, double mass,
                                        const std::function<double(double)>& potential,
                                        double v_left, double x_i, double x_f,
                                        const std::vector<double>& breakpoints,
                                        const OdeTolerances& tol = {});

struct StationaryOptions {
  double x_i = 0.0;  ///< 0: default of -10 nm; must lie in the constant branch
  double x_f = 0.0;  ///< 0: where |V| = 1e-8 E, capped at 2 um
  OdeTolerances tol{};
};

/// Point where |V(x)| falls to 1e-8 E, at most 2 micrometres.
double default_matching_point(double k, double mass, const PotentialParams& p);

ScatteringSolution stationary_reflectivity(double k, const PotentialParams& p, double mass,
                                           const StationaryOptions& options = {});

}  // namespace qrefl
