#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sixwave/doppler.hpp"
#include "sixwave/errors.hpp"
#include "sixwave/units.hpp"

using namespace sixwave;

namespace {

constexpr double kMass = 84.9118 * units::atomic_mass;

double sigma_v(double temperature) {
  return std::sqrt(units::k_boltzmann * temperature / kMass);
}

/// Weak-probe absorption of a two-level atom at one velocity class,
/// normalized as an area-1 line shape: Im(sigma_ge) / (pi * rabi).
double averaged_absorption(const VelocityGrid& grid, double gamma,
                           double wavenumber, double detuning) {
  const LevelScheme scheme = oracle::make_two_level_scheme(gamma, wavenumber);
  DriveParameters drives;
  drives.pump_rabi = units::two_pi * 1.0;  // 1 Hz: linear response
  drives.one_photon_detuning = detuning;
  drives.atom_number = 1.0;
  drives.length = 1.0;
  return doppler_average<double>(grid, [&](double v) {
    const LiouvilleSystem sys = build_liouville_system(scheme, drives, v);
    // <sigma_eg> = rho_ge; its imaginary part carries the absorption.
    // Linear response: Im rho_ge = (rabi/2) * pi * L(detuning).
    return sys.steady_state(sys.index(1, 0)).imag() /
           (units::pi * 0.5 * drives.pump_rabi);
  });
}

} // namespace

TEST_CASE("grid weights are normalized and symmetric") {
  for (VelocityQuadrature q :
       {VelocityQuadrature::gauss_hermite, VelocityQuadrature::trapezoid}) {
    const VelocityGrid grid = build_velocity_grid(400.0, kMass, 41, q, 4.0);
    REQUIRE(grid.nodes.size() == 41);
    double total = 0.0;
    for (double w : grid.weights) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
      CHECK(grid.nodes[k] ==
            doctest::Approx(-grid.nodes[grid.nodes.size() - 1 - k])
                .epsilon(1e-12));
      CHECK(grid.weights[k] ==
            doctest::Approx(grid.weights[grid.nodes.size() - 1 - k])
                .epsilon(1e-10));
    }
    // center node is exactly zero (odd count)
    CHECK(std::abs(grid.nodes[20]) < 1e-9);
  }
}

TEST_CASE("three-point Gauss-Hermite grid matches the known nodes") {
  const double t = 400.0;
  const VelocityGrid grid = build_velocity_grid(
      t, kMass, 3, VelocityQuadrature::gauss_hermite);
  const double s = sigma_v(t);
  // Hermite zeros of H_3: 0, +-sqrt(3/2); velocity nodes sqrt(2) s x
  CHECK(grid.nodes[0] == doctest::Approx(-std::sqrt(3.0) * s).epsilon(1e-12));
  CHECK(std::abs(grid.nodes[1]) < 1e-10);
  CHECK(grid.nodes[2] == doctest::Approx(std::sqrt(3.0) * s).epsilon(1e-12));
  CHECK(grid.weights[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(grid.weights[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("grid moments reproduce the Maxwell-Boltzmann distribution") {
  const double t = 400.0;
  const double s = sigma_v(t);
  for (VelocityQuadrature q :
       {VelocityQuadrature::gauss_hermite, VelocityQuadrature::trapezoid}) {
    const VelocityGrid grid = build_velocity_grid(t, kMass, 61, q, 6.0);
    double m1 = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
      m1 += grid.weights[k] * grid.nodes[k];
      m2 += grid.weights[k] * grid.nodes[k] * grid.nodes[k];
      m4 += grid.weights[k] * std::pow(grid.nodes[k], 4);
    }
    CHECK(std::abs(m1) < 1e-10 * s);
    CHECK(m2 == doctest::Approx(s * s).epsilon(1e-6));
    CHECK(m4 == doctest::Approx(3.0 * s * s * s * s).epsilon(1e-5));
  }
}

TEST_CASE("zero temperature or a single point collapse to one class") {
  const VelocityGrid cold = build_velocity_grid(0.0, kMass, 41);
  REQUIRE(cold.nodes.size() == 1);
  CHECK(cold.nodes[0] == 0.0);
  CHECK(cold.weights[0] == 1.0);

  const VelocityGrid single = build_velocity_grid(400.0, kMass, 1);
  REQUIRE(single.nodes.size() == 1);
  CHECK(single.nodes[0] == 0.0);
  CHECK(single.weights[0] == 1.0);
}

TEST_CASE("invalid grid requests are rejected") {
  CHECK_THROWS_AS(build_velocity_grid(-1.0, kMass, 11), config_error);
  CHECK_THROWS_AS(build_velocity_grid(400.0, kMass, 10), config_error);
  CHECK_THROWS_AS(build_velocity_grid(400.0, kMass, 0), config_error);
  CHECK_THROWS_AS(build_velocity_grid(400.0, -1.0, 11), config_error);
  CHECK_THROWS_AS(build_velocity_grid(400.0, kMass, 11,
                                      VelocityQuadrature::trapezoid, -2.0),
                  config_error);
}

TEST_CASE("grid construction is deterministic") {
  for (VelocityQuadrature q :
       {VelocityQuadrature::gauss_hermite, VelocityQuadrature::trapezoid}) {
    const VelocityGrid a = build_velocity_grid(400.0, kMass, 61, q);
    const VelocityGrid b = build_velocity_grid(400.0, kMass, 61, q);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t k = 0; k < a.nodes.size(); ++k) {
      CHECK(a.nodes[k] == b.nodes[k]);      // bitwise
      CHECK(a.weights[k] == b.weights[k]);  // bitwise
    }
  }
}

TEST_CASE("averaged absorption reproduces the Voigt profile") {
  const double t = 400.0;
  const double s = sigma_v(t);
  const double k = units::two_pi / 794.98e-9;

  SUBCASE("broad line, Gauss-Hermite nodes") {
    // linewidth comparable to the Doppler width: moderate node counts resolve
    const double gamma = units::from_mhz(300.0);
    const VelocityGrid grid = build_velocity_grid(
        t, kMass, 151, VelocityQuadrature::gauss_hermite);
    const double peak = oracle::simpson_voigt(0.0, gamma, k, s);
    for (double d_mhz : {0.0, 100.0, 300.0, 600.0}) {
      const double d = units::from_mhz(d_mhz);
      const double got = averaged_absorption(grid, gamma, k, d);
      const double expected = oracle::simpson_voigt(d, gamma, k, s);
      CHECK(std::abs(got - expected) < 1e-4 * peak);
    }
  }

  SUBCASE("narrow natural line, dense trapezoid nodes") {
    // linewidth much narrower than the Doppler width: the trapezoid grid
    // must sample at sub-linewidth spacing to resolve the Lorentzian core
    const double gamma = units::from_mhz(5.7);
    const VelocityGrid grid = build_velocity_grid(
        t, kMass, 3201, VelocityQuadrature::trapezoid, 5.0);
    const double peak = oracle::simpson_voigt(0.0, gamma, k, s);
    for (double d_mhz : {0.0, 50.0, 200.0}) {
      const double d = units::from_mhz(d_mhz);
      const double got = averaged_absorption(grid, gamma, k, d);
      const double expected = oracle::simpson_voigt(d, gamma, k, s);
      CHECK(std::abs(got - expected) < 1e-4 * peak);
    }
  }
}
