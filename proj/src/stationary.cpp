#include "qrefl/stationary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "qrefl/errors.hpp"
#include "qrefl/units.hpp"

namespace qrefl {
namespace {

constexpr cplx kI{0.0, 1.0};

OdeState axpy(const OdeState& y, double h, std::initializer_list<std::pair<double, const OdeState*>> terms) {
  OdeState out = y;
  for (const auto& [c, k] : terms) {
    out.y0 += (h * c) * k->y0;
    out.y1 += (h * c) * k->y1;
  }
  return out;
}

// Dormand & Prince (1980) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double component_error(cplx err, cplx y_old, cplx y_new, const OdeTolerances& tol) {
  auto one = [&](double e, double a, double b) {
    const double sc = tol.atol + tol.rtol * std::max(std::abs(a), std::abs(b));
    return (e / sc) * (e / sc);
  };
  return one(err.real(), y_old.real(), y_new.real()) + one(err.imag(), y_old.imag(), y_new.imag());
}

}  // namespace

double ScatteringSolution::flux_defect() const {
  const double in = k * std::norm(b);
  return std::abs(in - k * std::norm(a) - k_inner) / in;
}

OdeState integrate_dopri5(const std::function<OdeState(double, const OdeState&)>& rhs, OdeState y,
                          double x_start, double x_end, const std::vector<double>& breakpoints,
                          const OdeTolerances& tol, std::size_t* steps_taken) {
  std::vector<double> stops;
  for (double b : breakpoints)
    if (b > x_start && b < x_end) stops.push_back(b);
  std::sort(stops.begin(), stops.end());
  stops.push_back(x_end);

  constexpr double safe = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
  constexpr double expo = 0.2 - beta * 0.75;

  std::size_t steps = 0;
  double x = x_start;
  double h = 0.0;
  double err_old = 1e-4;
  for (double target : stops) {
    OdeState k1 = rhs(x, y);
    if (h <= 0.0) {
      // Initial guess from the local derivative scale.
      const double scale = std::max({std::abs(y.y0), std::abs(y.y1), tol.atol});
      const double rate = std::max({std::abs(k1.y0), std::abs(k1.y1), 1e-300});
      h = std::min(0.01 * scale / rate, target - x);
    }
    bool last_rejected = false;
    while (x < target) {
      if (steps >= tol.max_steps) {
        std::ostringstream msg;
        msg << "Runge-Kutta step budget (" << tol.max_steps << ") exhausted at x = " << x;
        throw IntegrationFailure(msg.str());
      }
      bool final_step = false;
      if (x + h >= target) {
        h = target - x;
        final_step = true;
      }
      const OdeState k2 = rhs(x + c2 * h, axpy(y, h, {{a21, &k1}}));
      const OdeState k3 = rhs(x + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      const OdeState k4 = rhs(x + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const OdeState k5 =
          rhs(x + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const OdeState k6 =
          rhs(x + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const OdeState y_new =
          axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const OdeState k7 = rhs(x + h, y_new);
      const OdeState err = axpy(OdeState{}, h, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
      const double e = std::sqrt(
          (component_error(err.y0, y.y0, y_new.y0, tol) + component_error(err.y1, y.y1, y_new.y1, tol)) / 4.0);
      ++steps;

      if (!std::isfinite(e)) {
        h *= 0.1;
        last_rejected = true;
        continue;
      }
      const double fac11 = std::pow(std::max(e, 1e-300), expo);
      if (e <= 1.0) {
        double fac = fac11 / std::pow(err_old, beta);
        fac = std::clamp(fac / safe, 1.0 / fac_max, 1.0 / fac_min);
        double h_new = h / fac;
        if (last_rejected) h_new = std::min(h_new, h);
        err_old = std::max(e, 1e-4);
        x = final_step ? target : x + h;
        y = y_new;
        k1 = k7;
        h = h_new;
        last_rejected = false;
      } else {
        h /= std::min(1.0 / fac_min, fac11 / safe);
        last_rejected = true;
      }
    }
  }
  if (steps_taken != nullptr) *steps_taken = steps;
  return y;
}

ScatteringSolution integrate_scattering(double k, double mass,
                                        const std::function<double(double)>& potential,
                                        double v_left, double x_i, double x_f,
                                        const std::vector<double>& breakpoints,
                                        const OdeTolerances& tol) {
  if (!(k > 0.0)) throw DomainError("incident wavenumber must be positive");
  if (!(x_f > x_i)) throw DomainError("matching point x_f must exceed x_i");
  const double energy = k * k / (2.0 * mass);
  if (!(energy > v_left)) {
    throw EvanescentTransmission("energy does not exceed the inner constant potential");
  }
  ScatteringSolution s;
  s.k = k;
  s.k_inner = std::sqrt(2.0 * mass * (energy - v_left));
  s.x_i = x_i;
  s.x_f = x_f;

  const cplx start = std::polar(1.0, -s.k_inner * x_i);
  OdeState y{start, -kI * s.k_inner * start};
  const double two_m = 2.0 * mass;
  auto rhs = [&](double x, const OdeState& st) {
    return OdeState{st.y1, two_m * (potential(x) - energy) * st.y0};
  };
  y = integrate_dopri5(rhs, y, x_i, x_f, breakpoints, tol, &s.steps);

  const cplx d_over_ik = y.y1 / (kI * k);
  s.a = 0.5 * (y.y0 + d_over_ik) * std::polar(1.0, -k * x_f);
  s.b = 0.5 * (y.y0 - d_over_ik) * std::polar(1.0, k * x_f);
  s.r = std::norm(s.a / s.b);
  return s;
}

double default_matching_point(double k, double mass, const PotentialParams& p) {
  const double cap = units::length_m(2.0 * units::micrometre);
  const double target = 1e-8 * k * k / (2.0 * mass);
  if (std::abs(casimir_vdw(cap, p)) >= target) return cap;
  double lo = p.x0, hi = cap;
  for (int it = 0; it < 200 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::abs(casimir_vdw(mid, p)) > target ? lo : hi) = mid;
  }
  return hi;
}

ScatteringSolution stationary_reflectivity(double k, const PotentialParams& p, double mass,
                                           const StationaryOptions& options) {
  p.validate();
  if (!(k > 0.0)) throw DomainError("incident wavenumber must be positive");
  const double x_i = options.x_i != 0.0 ? options.x_i : units::length_m(-10.0 * units::nanometre);
  if (!(x_i <= 0.0)) throw DomainError("x_i must lie in the constant branch (x_i <= 0)");
  const double x_f = options.x_f > 0.0 ? options.x_f : default_matching_point(k, mass, p);
  if (!(x_f > p.x0)) throw DomainError("x_f must lie beyond the connection point x0");
  const double energy = k * k / (2.0 * mass);
  if (std::abs(casimir_vdw(x_f, p)) > 1e-6 * energy) {
    std::ostringstream msg;
    msg << "potential at x_f = " << x_f << " is not negligible (|V|/E = "
        << std::abs(casimir_vdw(x_f, p)) / energy << " > 1e-6)";
    throw DomainError(msg.str());
  }
  // The continuation only depends on x, so it is evaluated for the static surface.
  PotentialParams still = p;
  still.d = 0.0;
  still.omega = 0.0;
  auto v = [&still](double x) { return continued_potential(x, still); };
  // On [x_i, 0] the potential is the constant floor and the transmitted plane
  // wave is exact, so numerical integration starts at 0. A and B are
  // normalised to the transmitted amplitude and do not depend on x_i.
  ScatteringSolution s =
      integrate_scattering(k, mass, v, potential_floor(still), 0.0, x_f, {still.x0}, options.tol);
  s.x_i = x_i;
  return s;
}

}  // namespace qrefl
