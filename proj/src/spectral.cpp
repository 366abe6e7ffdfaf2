#include "qrefl/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "qrefl/errors.hpp"
#include "qrefl/log.hpp"

namespace qrefl {
namespace {

// Planner calls are not thread-safe in FFTW; execution is.
std::mutex planner_mutex;

void run_fft(std::vector<cplx>& data, int sign) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, sign, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw InternalError("FFTW failed to create a plan");
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex);
  fftw_destroy_plan(plan);
}

}  // namespace

double MomentumSpectrum::total() const {
  double s = 0.0;
  for (double d : density) s += d;
  return s * dk;
}

double MomentumSpectrum::mean_k() const {
  double s = 0.0, sk = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    s += density[j];
    sk += density[j] * k[j];
  }
  return s > 0.0 ? sk / s : 0.0;
}

MomentumSpectrum momentum_spectrum(const WaveField& field, std::size_t padding) {
  const std::size_t n = field.psi.size();
  if (n == 0) throw InternalError("momentum_spectrum: empty field");
  if (padding == 0) padding = 1;
  std::size_t m = n * padding;
  if (m % 2) m += 1;

  std::vector<cplx> buf(m, cplx{0.0, 0.0});
  std::copy(field.psi.begin(), field.psi.end(), buf.begin());
  run_fft(buf, FFTW_FORWARD);

  MomentumSpectrum s;
  s.dx = field.grid.dx;
  s.x_min = field.grid.x_min;
  s.n_source = n;
  s.dk = 2.0 * std::numbers::pi / (static_cast<double>(m) * s.dx);
  s.k.resize(m);
  s.amplitude.resize(m);
  s.density.resize(m);
  const double scale = s.dx / std::sqrt(2.0 * std::numbers::pi);
  const std::size_t half = m / 2;
  for (std::size_t out = 0; out < m; ++out) {
    // ascending order: out = 0 holds j = -m/2
    const std::size_t j = (out + half) % m;
    const double jj = j >= half ? static_cast<double>(j) - static_cast<double>(m) : static_cast<double>(j);
    const double kk = jj * s.dk;
    s.k[out] = kk;
    s.amplitude[out] = scale * std::polar(1.0, -kk * s.x_min) * buf[j];
    s.density[out] = std::norm(s.amplitude[out]);
  }
  return s;
}

std::vector<cplx> inverse_spectrum(const MomentumSpectrum& spec) {
  const std::size_t m = spec.k.size();
  const std::size_t half = m / 2;
  std::vector<cplx> buf(m);
  const double scale = std::sqrt(2.0 * std::numbers::pi) / spec.dx;
  for (std::size_t out = 0; out < m; ++out) {
    const std::size_t j = (out + half) % m;
    buf[j] = scale * std::polar(1.0, spec.k[out] * spec.x_min) * spec.amplitude[out];
  }
  run_fft(buf, FFTW_BACKWARD);
  std::vector<cplx> psi(spec.n_source);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < spec.n_source; ++i) psi[i] = buf[i] * inv_m;
  return psi;
}

double reflectivity(const MomentumSpectrum& spec, double k_lo, double k_hi) {
  if (!(k_lo >= 0.0)) throw DomainError("reflectivity interval must start at k >= 0");
  if (!(k_hi > k_lo)) {
    std::ostringstream msg;
    msg << "empty reflectivity interval [" << k_lo << ", " << k_hi << ")";
    warn(msg.str());
    return 0.0;
  }
  auto first = std::lower_bound(spec.k.begin(), spec.k.end(), k_lo);
  auto last = std::lower_bound(spec.k.begin(), spec.k.end(), k_hi);
  double s = 0.0;
  for (auto it = first; it != last; ++it) s += spec.density[static_cast<std::size_t>(it - spec.k.begin())];
  return s * spec.dk;
}

double reflected_probability(const MomentumSpectrum& spec) {
  auto first = std::upper_bound(spec.k.begin(), spec.k.end(), 0.0);
  double s = 0.0;
  for (auto it = first; it != spec.k.end(); ++it) s += spec.density[static_cast<std::size_t>(it - spec.k.begin())];
  return s * spec.dk;
}

double ZDistribution::integral() const {
  double s = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) s += rho[j] * dz[j];
  return s;
}

ZDistribution z_transform(const MomentumSpectrum& spec, double omega_in, double omega, double mass) {
  if (!(omega > 0.0)) throw UndefinedTransform("z-transform needs a drive frequency omega > 0");
  ZDistribution zd;
  zd.omega_in = omega_in;
  zd.omega = omega;
  for (std::size_t j = 0; j < spec.k.size(); ++j) {
    const double k = spec.k[j];
    if (!(k > 0.0)) continue;
    zd.z.push_back((k * k / (2.0 * mass) - omega_in) / omega);
    zd.rho.push_back(spec.density[j] * mass * omega / k);
    zd.dz.push_back(k * spec.dk / (mass * omega));
  }
  return zd;
}

double parabolic_peak(double x0, double y0, double x1, double y1, double x2, double y2) {
  const double denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
  if (denom == 0.0) return x1;
  const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
  const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
  if (!(a < 0.0)) return x1;
  return std::clamp(-b / (2.0 * a), std::min(x0, x2), std::max(x0, x2));
}

SidebandReport sideband_decompose(const ZDistribution& zd, int n_min, int n_max) {
  if (n_min > 0 || n_max < 0) throw DomainError("sideband range must satisfy n_min <= 0 <= n_max");
  SidebandReport rep;
  std::map<int, std::size_t> argmax;
  for (int n = n_min; n <= n_max; ++n) rep.orders[n] = 0.0;
  for (std::size_t j = 0; j < zd.z.size(); ++j) {
    const double nf = std::floor(zd.z[j] + 0.5);
    if (nf < n_min || nf > n_max) continue;
    const int n = static_cast<int>(nf);
    rep.orders[n] += zd.rho[j] * zd.dz[j];
    auto it = argmax.find(n);
    if (it == argmax.end() || zd.rho[j] > zd.rho[it->second]) argmax[n] = j;
  }
  for (const auto& [n, r] : rep.orders) {
    rep.r_tot += r;
    if (r <= kPeakFloor) continue;
    const std::size_t j = argmax.at(n);
    if (j == 0 || j + 1 >= zd.z.size()) {
      rep.peak_z[n] = zd.z[j];
    } else {
      rep.peak_z[n] = parabolic_peak(zd.z[j - 1], zd.rho[j - 1], zd.z[j], zd.rho[j], zd.z[j + 1],
                                     zd.rho[j + 1]);
    }
  }
  return rep;
}

}  // namespace qrefl
