#include "qrefl/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qrefl {
namespace {

constexpr cplx kI{0.0, 1.0};

void require_finite_pivot(cplx pivot, std::size_t row, std::size_t step) {
  if (!std::isfinite(pivot.real()) || !std::isfinite(pivot.imag()) || std::abs(pivot) < 1e-300) {
    std::ostringstream msg;
    msg << "zero or non-finite pivot in tridiagonal elimination at row " << row;
    throw NumericalBreakdown(msg.str(), step);
  }
}

}  // namespace

void TridiagonalOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  const std::size_t n = size();
  if (x.size() != n || y.size() != n) throw InternalError("TridiagonalOperator::apply: size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    cplx s = diag[i] * x[i];
    if (i > 0) s += lower[i - 1] * x[i - 1];
    if (i + 1 < n) s += upper[i] * x[i + 1];
    y[i] = s;
  }
}

TridiagonalOperator build_hamiltonian(const GridSpec& g, double mass,
                                      std::span<const double> potential_values) {
  if (potential_values.size() != g.n_points) {
    throw InternalError("build_hamiltonian: potential has " +
                        std::to_string(potential_values.size()) + " samples, grid has " +
                        std::to_string(g.n_points));
  }
  const double off = -1.0 / (2.0 * mass * g.dx * g.dx);
  const std::size_t n = g.n_points;
  TridiagonalOperator h;
  h.lower.assign(n - 1, cplx(off));
  h.upper.assign(n - 1, cplx(off));
  h.diag.resize(n);
  for (std::size_t i = 0; i < n; ++i) h.diag[i] = cplx(-2.0 * off + potential_values[i]);
  return h;
}

void check_elimination_stable(const TridiagonalOperator& h, double dt) {
  const std::size_t n = h.size();
  if (n < 2 || h.lower.size() != n - 1 || h.upper.size() != n - 1)
    throw InternalError("tridiagonal operator has inconsistent band lengths");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive", "grid.dt");
  for (std::size_t i = 0; i < n; ++i) {
    if (h.diag[i].imag() != 0.0 || !std::isfinite(h.diag[i].real()))
      throw InternalError("Hamiltonian diagonal must be real and finite (row " + std::to_string(i) + ")");
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (h.lower[i] != h.upper[i] || h.lower[i].imag() != 0.0 || !std::isfinite(h.lower[i].real()))
      throw InternalError("Hamiltonian must be real symmetric (row " + std::to_string(i) + ")");
  }
}

void CrankNicolsonStepper::factor(const TridiagonalOperator& h, double dt, std::size_t step) {
  check_elimination_stable(h, dt);
  uniform_ = false;
  const std::size_t n = h.size();
  const double half = 0.5 * dt;
  a_lower_.resize(n - 1);
  b_lower_.resize(n - 1);
  b_upper_.resize(n - 1);
  b_diag_.resize(n);
  inv_pivot_.resize(n);
  c_prime_.resize(n);
  scratch_.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    a_lower_[i] = kI * half * h.lower[i];
    b_lower_[i] = -a_lower_[i];
    b_upper_[i] = -kI * half * h.upper[i];
  }
  cplx prev_c{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const cplx a_diag = 1.0 + kI * half * h.diag[i];
    b_diag_[i] = 1.0 - kI * half * h.diag[i];
    const cplx pivot = i == 0 ? a_diag : a_diag - a_lower_[i - 1] * prev_c;
    require_finite_pivot(pivot, i, step);
    inv_pivot_[i] = 1.0 / pivot;
    prev_c = i + 1 < n ? kI * half * h.upper[i] * inv_pivot_[i] : cplx{0.0, 0.0};
    c_prime_[i] = prev_c;
  }
}

void CrankNicolsonStepper::factor(double kinetic_offdiag, std::span<const double> v, double dt,
                                  std::size_t step, std::size_t meet) {
  const std::size_t n = v.size();
  if (n < 4) throw InternalError("CrankNicolsonStepper: need at least four points");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive", "grid.dt");
  if (!(kinetic_offdiag < 0.0)) throw InternalError("CrankNicolsonStepper: kinetic coupling must be negative");
  if (meet == kAutoMeet) meet = n / 2;
  if (meet < 1 || meet + 2 > n) throw InternalError("CrankNicolsonStepper: meeting row out of range");
  uniform_ = true;
  half_dt_ = 0.5 * dt;
  kinetic_offdiag_ = kinetic_offdiag;
  beta_ = half_dt_ * kinetic_offdiag;
  meet_ = meet;
  theta_.resize(n);
  inv_pivot_.clear();
  c_prime_.resize(n);
  scratch_.resize(n);
  refactor_range(v, 0, n - 1, step);
}

void CrankNicolsonStepper::refactor_range(std::span<const double> v, std::size_t lo, std::size_t hi,
                                          std::size_t step) {
  const std::size_t n = c_prime_.size();
  if (!uniform_ || v.size() != n) throw InternalError("CrankNicolsonStepper::refactor_range: not factored");
  const std::size_t k = meet_;
  if (lo > k || hi < k || hi >= n) throw InternalError("CrankNicolsonStepper::refactor_range: bad range");
  const double kin_diag = -2.0 * kinetic_offdiag_;
  for (std::size_t i = lo; i <= hi; ++i) theta_[i] = half_dt_ * (kin_diag + v[i]);

  // Twisted factorisation: eliminate downwards on [0, k) and upwards on
  // (k, n), meeting at k. The two recurrences are independent, which halves
  // the serial latency. pivot_j = 1 + i theta_j + beta^2 / pivot_neighbour,
  // and m_j = -i beta / pivot_j is stored for every row, so rows outside
  // [lo, hi] keep their pivots and 1 / pivot_j = i m_j / beta.
  const double beta2 = beta_ * beta_;
  const cplx minus_i_beta(0.0, -beta_);
  const cplx i_over_beta(0.0, 1.0 / beta_);
  cplx inv_top = lo > 0 ? i_over_beta * c_prime_[lo - 1] : cplx{0.0, 0.0};
  cplx inv_bot = hi + 1 < n ? i_over_beta * c_prime_[hi + 1] : cplx{0.0, 0.0};
  auto eliminate = [&](std::size_t j, cplx& inv) {
    const cplx pj = cplx(1.0, theta_[j]) + beta2 * inv;
    require_finite_pivot(pj, j, step);
    inv = 1.0 / pj;
    c_prime_[j] = minus_i_beta * inv;
  };
  const std::size_t lt = k - lo, lb = hi - k;  // rows on each side of k
  const std::size_t common = std::min(lt, lb);
  for (std::size_t i = 0; i < common; ++i) {
    eliminate(lo + i, inv_top);
    eliminate(hi - i, inv_bot);
  }
  for (std::size_t i = common; i < lt; ++i) eliminate(lo + i, inv_top);
  for (std::size_t i = common; i < lb; ++i) eliminate(hi - i, inv_bot);
  const cplx pk = cplx(1.0, theta_[k]) + beta2 * (inv_top + inv_bot);
  require_finite_pivot(pk, k, step);
  c_prime_[k] = minus_i_beta / pk;
}

void CrankNicolsonStepper::advance(std::span<cplx> psi) {
  if (psi.size() != c_prime_.size()) throw InternalError("CrankNicolsonStepper::advance: size mismatch");
  if (uniform_) {
    advance_uniform(psi);
  } else {
    advance_general(psi);
  }
}

void CrankNicolsonStepper::advance_general(std::span<cplx> psi) {
  const std::size_t n = inv_pivot_.size();
  cplx* y = scratch_.data();
  // Forward sweep with the explicit half step folded in.
  y[0] = (b_diag_[0] * psi[0] + b_upper_[0] * psi[1]) * inv_pivot_[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const cplx rhs = b_lower_[i - 1] * psi[i - 1] + b_diag_[i] * psi[i] + b_upper_[i] * psi[i + 1];
    y[i] = (rhs - a_lower_[i - 1] * y[i - 1]) * inv_pivot_[i];
  }
  {
    const std::size_t i = n - 1;
    const cplx rhs = b_lower_[i - 1] * psi[i - 1] + b_diag_[i] * psi[i];
    y[i] = (rhs - a_lower_[i - 1] * y[i - 1]) * inv_pivot_[i];
  }
  psi[n - 1] = y[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) psi[i] = y[i] - c_prime_[i] * psi[i + 1];
}

void CrankNicolsonStepper::advance_uniform(std::span<cplx> psi_span) {
  // Real arithmetic on interleaved (re, im) pairs, matching the twisted
  // factorisation. With A_off = i beta, B = conj(A), m_j = -i beta / pivot_j:
  //   rhs_j = (1 - i theta_j) psi_j - i beta (psi_{j-1} + psi_{j+1})
  //   y_j   = rhs_j / pivot_j + m_j y_{j-+1}      (towards k)
  //   psi_j = y_j + m_j psi_{j+-1}                (away from k)
  // Only the m_j products sit on the two serial chains.
  const std::size_t n = c_prime_.size();
  const std::size_t k = meet_;
  const double b = beta_;
  const double ib = 1.0 / beta_;
  const double* th = theta_.data();
  const double* m = reinterpret_cast<const double*>(c_prime_.data());
  double* y = reinterpret_cast<double*>(scratch_.data());
  double* p = reinterpret_cast<double*>(psi_span.data());

  // rhs_j / pivot_j with neighbours lr/li and ur/ui.
  auto scaled = [&](std::size_t j, double nsum_r, double nsum_i, double& qr, double& qi) {
    const double cr = p[2 * j], ci = p[2 * j + 1];
    const double rr = cr + th[j] * ci + b * nsum_i;
    const double ri = ci - th[j] * cr - b * nsum_r;
    const double wr = -m[2 * j + 1] * ib, wi = m[2 * j] * ib;
    qr = rr * wr - ri * wi;
    qi = rr * wi + ri * wr;
  };
  auto interior = [&](std::size_t j, double& qr, double& qi) {
    scaled(j, p[2 * j - 2] + p[2 * j + 2], p[2 * j - 1] + p[2 * j + 3], qr, qi);
  };
  auto push = [&](std::size_t j, double qr, double qi, double& cr, double& ci) {
    const double mr = m[2 * j], mi = m[2 * j + 1];
    const double nr = qr + mr * cr - mi * ci;
    const double ni = qi + mr * ci + mi * cr;
    cr = nr;
    ci = ni;
    y[2 * j] = cr;
    y[2 * j + 1] = ci;
  };

  // Edge rows have a single neighbour.
  double tr, ti, br, bi;
  scaled(0, p[2], p[3], tr, ti);
  y[0] = tr;
  y[1] = ti;
  const std::size_t e = n - 1;
  scaled(e, p[2 * e - 2], p[2 * e - 1], br, bi);
  y[2 * e] = br;
  y[2 * e + 1] = bi;

  const std::size_t lt = k - 1, lb = n - 2 - k;  // remaining rows on each side
  const std::size_t common = std::min(lt, lb);
  for (std::size_t i = 1; i <= common; ++i) {
    double qr, qi, sr, si;
    interior(i, qr, qi);
    interior(e - i, sr, si);
    push(i, qr, qi, tr, ti);
    push(e - i, sr, si, br, bi);
  }
  for (std::size_t i = common + 1; i <= lt; ++i) {
    double qr, qi;
    interior(i, qr, qi);
    push(i, qr, qi, tr, ti);
  }
  for (std::size_t i = common + 1; i <= lb; ++i) {
    double qr, qi;
    interior(e - i, qr, qi);
    push(e - i, qr, qi, br, bi);
  }

  // Middle row: pivot_k x_k = rhs_k - i beta (y_{k-1} + y_{k+1}).
  double xr, xi;
  scaled(k, p[2 * k - 2] + p[2 * k + 2] + tr + br, p[2 * k - 1] + p[2 * k + 3] + ti + bi, xr, xi);
  p[2 * k] = xr;
  p[2 * k + 1] = xi;

  auto pull = [&](std::size_t j, double& cr, double& ci) {
    const double mr = m[2 * j], mi = m[2 * j + 1];
    const double nr = y[2 * j] + mr * cr - mi * ci;
    const double ni = y[2 * j + 1] + mr * ci + mi * cr;
    cr = nr;
    ci = ni;
    p[2 * j] = cr;
    p[2 * j + 1] = ci;
  };
  double ur = xr, ui = xi;
  const std::size_t down = k, up = e - k;
  const std::size_t both = std::min(down, up);
  for (std::size_t i = 1; i <= both; ++i) {
    pull(k - i, xr, xi);
    pull(k + i, ur, ui);
  }
  for (std::size_t i = both + 1; i <= down; ++i) pull(k - i, xr, xi);
  for (std::size_t i = both + 1; i <= up; ++i) pull(k + i, ur, ui);
}

namespace {

struct LoopSetup {
  std::size_t total_steps = 0;  // FixedTime only
  std::size_t window = 0;       // Stationary only
  double epsilon = 0.0;
  bool stationary = false;
};

LoopSetup resolve_stop(const StopRule& stop, const GridSpec& g, double omega) {
  LoopSetup s;
  if (const auto* fixed = std::get_if<FixedTime>(&stop)) {
    if (!(fixed->t_final >= 0.0)) throw ConfigError("t_final must be >= 0", "analysis.stop.t_final_s");
    s.total_steps = static_cast<std::size_t>(std::ceil(fixed->t_final / g.dt - 1e-9));
  } else {
    const auto& st = std::get<Stationary>(stop);
    s.stationary = true;
    s.epsilon = st.epsilon;
    if (st.window_steps > 0) {
      s.window = st.window_steps;
    } else if (omega > 0.0) {
      s.window = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(2.0 * std::numbers::pi / (omega * g.dt))));
    } else {
      s.window = 1000;
    }
  }
  return s;
}

// Shared time loop. `refresh` fills the stepper for the step starting at t
// and returns false when the factorisation can be reused.
template <class Refresh>
PropagationResult run_loop(const WaveField& initial, const AbsorberSpec* absorber,
                           const StopRule& stop, double omega, const PropagateOptions& options,
                           CrankNicolsonStepper& stepper, Refresh&& refresh) {
  const GridSpec& g = initial.grid;
  const LoopSetup setup = resolve_stop(stop, g, omega);

  std::vector<double> mask;
  std::size_t mask_end = 0;
  if (absorber != nullptr && options.absorber_enabled) {
    mask = damping_mask(g, *absorber);
    mask_end = static_cast<std::size_t>(
        std::find_if(mask.begin(), mask.end(), [](double f) { return f >= 1.0; }) - mask.begin());
  }

  PropagationResult result;
  result.final = initial;
  WaveField& f = result.final;

  std::size_t history_every = options.history_every;
  if (history_every == 0) {
    history_every = setup.stationary ? setup.window : std::max<std::size_t>(1, setup.total_steps / 200);
  }
  result.reflected_norm_history.emplace_back(f.t, f.norm_above(options.x_probe));

  double window_norm = f.norm_above(options.x_probe);
  double window_centroid = f.centroid_above(options.x_probe);

  const double t0 = initial.t;
  for (std::size_t step = 0;; ++step) {
    if (!setup.stationary && step >= setup.total_steps) break;
    if (setup.stationary && step >= options.max_steps) {
      result.steps = step;
      throw PropagationTimeout("stationarity not reached within " + std::to_string(options.max_steps) +
                                   " steps",
                               std::move(result));
    }
    refresh(f.t, step);
    stepper.advance(f.psi);
    f.t = t0 + static_cast<double>(step + 1) * g.dt;

    if (mask_end > 0) {
      double lost = 0.0;
      for (std::size_t i = 0; i < mask_end; ++i) {
        const double before = std::norm(f.psi[i]);
        f.psi[i] *= mask[i];
        lost += before - std::norm(f.psi[i]);
      }
      result.absorbed_norm += lost * g.dx;
    }

    const std::size_t done = step + 1;
    if (done % history_every == 0) {
      result.reflected_norm_history.emplace_back(f.t, f.norm_above(options.x_probe));
    }
    if (options.on_snapshot && options.snapshot_every > 0 && done % options.snapshot_every == 0) {
      options.on_snapshot(f);
    }
    if (setup.stationary && done % setup.window == 0) {
      const double n_now = f.norm_above(options.x_probe);
      const double c_now = f.centroid_above(options.x_probe);
      const bool flat = n_now > 0.0 && std::abs(n_now - window_norm) <= setup.epsilon * n_now;
      const bool outward = c_now > options.x_probe && c_now > window_centroid;
      window_norm = n_now;
      window_centroid = c_now;
      if (flat && outward) {
        result.steps = done;
        return result;
      }
    }
    result.steps = done;
  }
  return result;
}

// Rows the drive can change. Below -|d| the continuation is the constant
// floor for every shift. Above, |W(x, t) - V(x)| <= |d| |V'(x - |d|)|, so the
// window ends where that bound drops under `tol`.
std::pair<std::size_t, std::size_t> driven_rows(const GridSpec& g, const PotentialParams& p,
                                                double tol) {
  const std::size_t n = g.n_points;
  const double amp = std::abs(p.d);
  std::size_t lo = 0;
  while (lo + 1 < n && g.x(lo) < -amp) ++lo;
  lo = lo > 0 ? lo - 1 : 0;
  std::size_t hi = n - 1;
  if (tol > 0.0) {
    std::size_t j = lo;
    while (j < n && !(g.x(j) - amp > p.x0 && amp * casimir_vdw_derivative(g.x(j) - amp, p) <= tol)) ++j;
    hi = std::min(n - 1, j);
  }
  lo = std::max<std::size_t>(lo, 1);
  hi = std::clamp<std::size_t>(hi, std::min(lo + 2, n - 2), n - 1);
  return {lo, hi};
}

}  // namespace

PropagationResult propagate(const WaveField& initial, const PotentialParams& p, double mass,
                            const AbsorberSpec& absorber, const StopRule& stop,
                            const PropagateOptions& options) {
  p.validate();
  const GridSpec& g = initial.grid;
  g.validate();
  if (initial.psi.size() != g.n_points) throw InternalError("propagate: field size mismatch");

  const double off = -1.0 / (2.0 * mass * g.dx * g.dx);
  std::vector<double> v(g.n_points);
  CrankNicolsonStepper stepper;

  if (p.is_static()) {
    sample_potential(g.x_min, g.dx, 0.0, p, v);
    stepper.factor(off, v, g.dt);
    return run_loop(initial, &absorber, stop, 0.0, options, stepper, [](double, std::size_t) {});
  }

  const auto [lo, hi] = driven_rows(g, p, options.frozen_potential_tol);
  PotentialParams rest = p;
  rest.d = 0.0;
  sample_potential(g.x_min, g.dx, 0.0, rest, v);
  stepper.factor(off, v, g.dt, 0, lo + (hi - lo) / 2);
  const std::span<double> window(v.data() + lo, hi - lo + 1);
  return run_loop(initial, &absorber, stop, p.omega, options, stepper,
                  [&](double t, std::size_t step) {
                    sample_potential(g.x_min, g.dx, t + 0.5 * g.dt, p, window, lo);
                    stepper.refactor_range(v, lo, hi, step);
                  });
}

PropagationResult propagate_fixed_potential(const WaveField& initial, std::span<const double> v,
                                            double mass, const AbsorberSpec* absorber,
                                            const StopRule& stop, const PropagateOptions& options) {
  const GridSpec& g = initial.grid;
  g.validate();
  CrankNicolsonStepper stepper(build_hamiltonian(g, mass, v), g.dt);
  return run_loop(initial, absorber, stop, 0.0, options, stepper, [](double, std::size_t) {});
}

}  // namespace qrefl
