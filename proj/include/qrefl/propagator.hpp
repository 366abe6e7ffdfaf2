#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "qrefl/errors.hpp"
#include "qrefl/grid_packet.hpp"
#include "qrefl/potential.hpp"

namespace qrefl {

/// Three-point finite-difference Hamiltonian
/// H = -(1/2m) D2 + diag(V) with Dirichlet walls just outside the box.
struct TridiagonalOperator {
  std::vector<cplx> lower;  // n - 1
  std::vector<cplx> diag;   // n
  std::vector<cplx> upper;  // n - 1

  std::size_t size() const { return diag.size(); }
  /// y = H x
  void apply(std::span<const cplx> x, std::span<cplx> y) const;
};

TridiagonalOperator build_hamiltonian(const GridSpec& g, double mass,
                                      std::span<const double> potential_values);

/// Crank-Nicolson step (1 + i dt H / 2) psi' = (1 - i dt H / 2) psi solved by
/// Thomas elimination. The factorisation is kept so repeated steps with the
/// same operator only pay for the substitution sweeps.
class CrankNicolsonStepper {
 public:
  CrankNicolsonStepper() = default;
  CrankNicolsonStepper(const TridiagonalOperator& h, double dt) { factor(h, dt); }

  /// (Re)factorise for operator `h`. Throws NumericalBreakdown on a zero pivot.
  void factor(const TridiagonalOperator& h, double dt, std::size_t step = 0);
  static constexpr std::size_t kAutoMeet = static_cast<std::size_t>(-1);

  /// Fast path for H = -(1/2m) D2 + diag(V) on a uniform grid. Elimination
  /// runs from both ends towards row `meet` (default: the middle).
  void factor(double kinetic_offdiag, std::span<const double> v, double dt, std::size_t step = 0,
              std::size_t meet = kAutoMeet);
  /// After the fast-path factor: V changed only on rows [lo, hi], which must
  /// contain the meeting row. Costs O(hi - lo).
  void refactor_range(std::span<const double> v, std::size_t lo, std::size_t hi, std::size_t step = 0);

  void advance(std::span<cplx> psi);

  std::size_t size() const { return c_prime_.size(); }

 private:
  void advance_general(std::span<cplx> psi);
  void advance_uniform(std::span<cplx> psi);

  // A = I + i dt/2 H; B = I - i dt/2 H.
  bool uniform_ = false;
  // General operator.
  std::vector<cplx> a_lower_, b_diag_, b_lower_, b_upper_, c_prime_;
  // Uniform kinetic coupling: A_off = i beta, A_diag = 1 + i theta_j.
  double beta_ = 0.0, half_dt_ = 0.0, kinetic_offdiag_ = 0.0;
  std::size_t meet_ = 0;
  std::vector<double> theta_;
  std::vector<cplx> inv_pivot_, scratch_;
};

/// Rejects operators whose Crank-Nicolson matrix would not have a positive
/// definite Hermitian part (non-real or non-symmetric H, non-finite entries).
/// With that property every Thomas pivot has real part >= 1, so elimination
/// without pivoting cannot break down.
void check_elimination_stable(const TridiagonalOperator& h, double dt);

WaveField cn_step(const WaveField& field, const TridiagonalOperator& h, double dt);

struct FixedTime {
  double t_final;
};

/// Stop once the norm beyond the probe point changes by less than `epsilon`
/// (relative) over one window while the reflected centroid moves outward.
struct Stationary {
  double epsilon = 1e-5;
  std::size_t window_steps = 0;  ///< 0: one drive period, or 1000 steps when static
};

using StopRule = std::variant<FixedTime, Stationary>;

struct PropagateOptions {
  bool absorber_enabled = true;
  double x_probe = 0.0;                  ///< reflected region is x > x_probe
  std::size_t history_every = 0;         ///< 0: about 200 samples over the run
  std::size_t max_steps = 50'000'000;
  std::size_t snapshot_every = 0;        ///< 0: no snapshots
  std::function<void(const WaveField&)> on_snapshot;
  /// Driven runs: rows where the drive changes W by at most this much
  /// (Hartree) keep the static potential and are not refactored. 0: exact.
  double frozen_potential_tol = 0.0;
};

struct PropagationResult {
  WaveField final;
  std::vector<std::pair<double, double>> reflected_norm_history;  ///< (t, norm above x_probe)
  double absorbed_norm = 0.0;
  std::size_t steps = 0;
};

/// Raised when a Stationary rule does not converge before max_steps.
class PropagationTimeout : public Error {
 public:
  PropagationTimeout(const std::string& message, PropagationResult partial)
      : Error("timeout", message), partial_(std::move(partial)) {}
  const PropagationResult& partial() const noexcept { return partial_; }

 private:
  PropagationResult partial_;
};

/// Time loop: sample W at t + dt/2, factor, step, apply the damping mask.
PropagationResult propagate(const WaveField& initial, const PotentialParams& p, double mass,
                            const AbsorberSpec& absorber, const StopRule& stop,
                            const PropagateOptions& options = {});

/// Same loop with an arbitrary (time-independent) potential sampled on the grid.
PropagationResult propagate_fixed_potential(const WaveField& initial, std::span<const double> v,
                                            double mass, const AbsorberSpec* absorber,
                                            const StopRule& stop,
                                            const PropagateOptions& options = {});

}  // namespace qrefl
