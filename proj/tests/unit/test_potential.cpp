#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qrefl/errors.hpp"
#include "qrefl/potential.hpp"
#include "qrefl/units.hpp"

using namespace qrefl;

namespace {
const double kAngstrom = units::length_m(1e-10);
}

TEST_SUITE("potential") {
  TEST_CASE("defaults in atomic units") {
    const auto p = default_surface(4 * kAngstrom);
    CHECK(p.c4 == doctest::Approx(10.896).epsilon(1e-4));
    CHECK(p.l == doctest::Approx(175.74).epsilon(1e-4));
    const double v_meV = units::from_internal(casimir_vdw(4 * kAngstrom, p), units::Dimension::energy).value /
                         units::electron_volt * 1e3;
    CHECK(v_meV == doctest::Approx(-3.745).epsilon(1e-3));
  }

  TEST_CASE("raw form rejects the surface and the inside") {
    const auto p = default_surface(4 * kAngstrom);
    CHECK_THROWS_AS(casimir_vdw(0.0, p), DomainError);
    CHECK_THROWS_AS(casimir_vdw(-1.0, p), DomainError);
    CHECK_THROWS_AS(casimir_vdw_derivative(0.0, p), DomainError);
  }

  TEST_CASE("analytic derivative matches central differences") {
    const auto p = default_surface(4 * kAngstrom);
    for (double x : {2.0, 7.5, 40.0, 175.0, 900.0, 1e4}) {
      const double h = 1e-4 * x;
      const double fd = (casimir_vdw(x + h, p) - casimir_vdw(x - h, p)) / (2 * h);
      CHECK(casimir_vdw_derivative(x, p) == doctest::Approx(fd).epsilon(1e-7));
    }
  }

  TEST_CASE("continuation branches") {
    const double x0 = 5 * kAngstrom;
    const auto p = default_surface(x0);
    const double v0 = casimir_vdw(x0, p);
    const double s = casimir_vdw_derivative(x0, p);
    CHECK(potential_floor(p) == doctest::Approx(v0 - 0.5 * s * x0).epsilon(1e-14));
    CHECK(continued_potential(2 * x0, p) == casimir_vdw(2 * x0, p));
    CHECK(continued_potential(-3.0, p) == potential_floor(p));
    CHECK(continued_potential(-1e6, p) == potential_floor(p));
    CHECK(continued_potential(0.0, p) == doctest::Approx(potential_floor(p)).epsilon(1e-14));
    // Parabola is monotone between the floor and the connection point.
    double prev = continued_potential(0.0, p);
    for (int i = 1; i <= 50; ++i) {
      const double v = continued_potential(x0 * i / 50.0, p);
      CHECK(v >= prev);
      prev = v;
    }
  }

  TEST_CASE("continuation is C1 at the connection point and at zero") {
    for (double x0A : {3.7, 5.0, 7.3, 40.0}) {
      const double x0 = x0A * kAngstrom;
      const auto p = default_surface(x0);
      const double h = 1e-7 * x0;
      for (double xc : {0.0, x0}) {
        const double left = continued_potential(xc - h, p);
        const double mid = continued_potential(xc, p);
        const double right = continued_potential(xc + h, p);
        const double scale = std::abs(potential_floor(p));
        CHECK(std::abs(right - left) / scale < 1e-5);
        const double slope_l = (mid - left) / h;
        const double slope_r = (right - mid) / h;
        const double slope_scale = casimir_vdw_derivative(x0, p);
        CHECK(std::abs(slope_l - slope_r) / slope_scale < 1e-5);
      }
    }
  }

  TEST_CASE("oscillating potential is periodic and rigidly shifted") {
    const double omega_in = 2.2975e-9;
    const auto p = default_surface(5 * kAngstrom, 4e-9 / 5.29177210903e-11, 0.5 * omega_in);
    const double period = 2 * std::numbers::pi / p.omega;
    for (double x : {-20.0, 3.0, 9.0, 80.0, 500.0}) {
      for (double t : {0.0, 0.13 * period, 0.77 * period}) {
        const double a = oscillating_potential(x, t, p);
        const double b = oscillating_potential(x, t + period, p);
        CHECK(b == doctest::Approx(a).epsilon(1e-9));
        CHECK(a == continued_potential(x - surface_shift(t, p), p));
      }
    }
    CHECK(surface_shift(0.25 * period, p) == doctest::Approx(p.d).epsilon(1e-12));
  }

  TEST_CASE("static parameters ignore time") {
    auto p = default_surface(5 * kAngstrom, 0.0, 1e-9);
    CHECK(p.is_static());
    CHECK(oscillating_potential(12.0, 1e9, p) == continued_potential(12.0, p));
    p = default_surface(5 * kAngstrom, 10.0, 0.0);
    CHECK(p.is_static());
  }

  TEST_CASE("sampling matches pointwise evaluation, also from an offset") {
    const auto p = default_surface(5 * kAngstrom, 50.0, 1e-9);
    std::vector<double> all(400), part(100);
    const double x_min = -100.0, dx = 0.7, t = 3e8;
    sample_potential(x_min, dx, t, p, all);
    sample_potential(x_min, dx, t, p, part, 250);
    for (std::size_t i = 0; i < all.size(); ++i) {
      CHECK(all[i] == oscillating_potential(x_min + static_cast<double>(i) * dx, t, p));
    }
    for (std::size_t i = 0; i < part.size(); ++i) CHECK(part[i] == all[250 + i]);
  }

  TEST_CASE("invalid parameters are rejected") {
    auto p = default_surface(5 * kAngstrom);
    p.c4 = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = default_surface(5 * kAngstrom);
    p.x0 = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = default_surface(5 * kAngstrom);
    p.d = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = default_surface(5 * kAngstrom);
    p.omega = std::nan("");
    CHECK_THROWS_AS(p.validate(), ConfigError);
  }
}
