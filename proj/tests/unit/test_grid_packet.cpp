#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qrefl/errors.hpp"
#include "qrefl/grid_packet.hpp"
#include "qrefl/spectral.hpp"
#include "qrefl/units.hpp"

using namespace qrefl;

namespace {
PacketSpec helium_packet(double x_center_m = 2e-6) {
  return PacketSpec{units::length_m(x_center_m), -units::velocity_mps(2.0), 0.03, units::mass_u(3.01603)};
}

bool seven_smooth(std::size_t n) {
  for (std::size_t f : {2u, 3u, 5u, 7u}) {
    while (n % f == 0) n /= f;
  }
  return n == 1;
}
}  // namespace

TEST_SUITE("grid_packet") {
  TEST_CASE("uniform grid validation") {
    const auto g = GridSpec::uniform(-10.0, 30.0, 400, 1.0);
    CHECK(g.dx == doctest::Approx(40.0 / 399.0));
    CHECK(g.x(399) == doctest::Approx(30.0));
    CHECK_THROWS_AS(GridSpec::uniform(-10.0, 30.0, 401, 1.0), ConfigError);
    CHECK_THROWS_AS(GridSpec::uniform(1.0, 30.0, 400, 1.0), ConfigError);
    CHECK_THROWS_AS(GridSpec::uniform(-10.0, 30.0, 400, 0.0), ConfigError);
    CHECK_THROWS_AS(GridSpec::uniform(-10.0, 30.0, 2, 1.0), ConfigError);
  }

  TEST_CASE("packet is normalised and carries the requested momentum") {
    const auto s = helium_packet();
    const double sx = s.sigma_x();
    const auto g = GridSpec::uniform(-2000.0, s.x_center + 8 * sx, 60000, 1.0);
    const auto f = gaussian_packet(g, s);
    CHECK(f.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const auto spec = momentum_spectrum(f, 2);
    CHECK(spec.mean_k() == doctest::Approx(s.k_mean()).epsilon(1e-3));
    CHECK(spec.total() == doctest::Approx(1.0).epsilon(1e-12));
    // Position mean and width.
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < g.n_points; ++i) mean += std::norm(f.psi[i]) * g.x(i) * g.dx;
    for (std::size_t i = 0; i < g.n_points; ++i) var += std::norm(f.psi[i]) * std::pow(g.x(i) - mean, 2) * g.dx;
    CHECK(mean == doctest::Approx(s.x_center).epsilon(1e-9));
    CHECK(std::sqrt(var) == doctest::Approx(sx).epsilon(1e-6));
  }

  TEST_CASE("packet must fit inside the box") {
    const auto s = helium_packet();
    const auto g = GridSpec::uniform(-2000.0, s.x_center + 2 * s.sigma_x(), 60000, 1.0);
    CHECK_THROWS_AS(gaussian_packet(g, s), ConfigError);
  }

  TEST_CASE("absorber calibration") {
    const double x_b = units::length_m(-3e-6);
    const auto a = calibrate_absorber(x_b);
    CHECK(a.a == doctest::Approx(units::length_m(-2e-6)).epsilon(1e-12));
    CHECK(a.sigma == doctest::Approx(units::length_m(54.29e-9)).epsilon(1e-4));
    CHECK(a(x_b) == doctest::Approx(1e-8).epsilon(1e-6));
    CHECK(std::abs(a(0.0) - 1.0) <= 1e-16);
    CHECK_THROWS_AS(calibrate_absorber(1.0), ConfigError);
  }

  TEST_CASE("damping mask is monotone in [0, 1]") {
    const auto g = GridSpec::uniform(-600.0, 300.0, 900, 1.0);
    const auto a = calibrate_absorber(g.x_min);
    const auto m = damping_mask(g, a);
    CHECK(m.front() == doctest::Approx(1e-8).epsilon(1e-3));
    for (std::size_t i = 1; i < m.size(); ++i) {
      CHECK(m[i] >= m[i - 1]);
      CHECK(m[i] <= 1.0);
    }
    CHECK(m.back() == 1.0);
  }

  TEST_CASE("FFT-friendly sizes are minimal even 7-smooth numbers") {
    CHECK(fft_friendly_size(1) == 4);
    for (std::size_t n = 4; n < 3000; ++n) {
      const std::size_t m = fft_friendly_size(n);
      REQUIRE(m >= n);
      REQUIRE(m % 2 == 0);
      REQUIRE(seven_smooth(m));
      for (std::size_t j = n; j < m; ++j) REQUIRE_FALSE((j % 2 == 0 && seven_smooth(j)));
    }
  }

  TEST_CASE("automatic discretisation rules") {
    GridPlanInput in;
    in.packet = helium_packet();
    const double e = in.packet.energy();
    in.v_floor = -1e-4;
    in.e_max = 1.5 * e;
    in.v_out_max = std::sqrt(2 * in.e_max / in.packet.mass);
    in.t_final = 3e10;
    const auto plan = plan_grid(in);
    const auto& g = plan.grid;
    const double k_deep = std::sqrt(2 * in.packet.mass * (in.e_max - in.v_floor));
    CHECK(g.dx <= 2 * std::numbers::pi / k_deep / 20.0);
    CHECK(g.dx >= 0.9 * 2 * std::numbers::pi / k_deep / 20.0);
    CHECK(g.n_points % 2 == 0);
    CHECK(seven_smooth(g.n_points));
    CHECK(g.x_max >= in.packet.x_center + 6 * in.packet.sigma_x());
    CHECK(g.x_min <= -0.3 * g.x_max * (1 - 1e-12));
    CHECK(plan.absorber.x_b == g.x_min);
    CHECK(g.dt * in.e_max <= 0.02);
    const double v_deep = k_deep / in.packet.mass;
    CHECK(g.dt * v_deep * 10.0 <= -g.x_min / 3.0 * (1 + 1e-12));

    in.omega = 1e-6;
    CHECK(plan_grid(in).grid.dt * in.omega <= 0.02 * (1 + 1e-12));

    in.dx_override = 3.0;
    in.dt_override = 1e5;
    const auto fixed = plan_grid(in);
    CHECK(fixed.grid.dt == 1e5);
    CHECK(fixed.grid.dx <= 3.0);
  }
}
