#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sixwave/liouville.hpp"
#include "sixwave/units.hpp"

using namespace sixwave;

namespace {

DriveParameters default_drives() {
  DriveParameters d;
  d.pump_rabi = units::from_mhz(480.0);
  d.dressing_rabi = units::from_mhz(96.0);
  d.one_photon_detuning = units::from_mhz(1010.0);
  d.two_photon_detuning = units::from_mhz(-4.0);
  d.dressing_detuning = units::from_mhz(-1040.0);
  d.coupling_a = units::from_mhz(0.0288);
  d.coupling_b = units::from_mhz(0.0288);
  d.atom_number = 2e10;
  d.length = 0.025;
  return d;
}

VectorXc trace_vector(int dim) {
  VectorXc u = VectorXc::Zero(dim * dim);
  for (int k = 0; k < dim; ++k) u(k * dim + k) = 1.0;
  return u;
}

} // namespace

TEST_CASE("two-level decay dynamics match the exponential solution") {
  const double gamma = units::from_mhz(5.7);
  const LevelScheme scheme = oracle::make_two_level_scheme(gamma);
  DriveParameters drives;  // no pump light
  drives.atom_number = 1.0;
  drives.length = 1.0;
  const LiouvilleSystem sys = build_liouville_system(scheme, drives);

  // start in the excited state with a coherence
  VectorXc x0 = VectorXc::Zero(4);
  x0(sys.index(1, 1)) = 1.0;
  x0(sys.index(0, 1)) = 0.5;
  x0(sys.index(1, 0)) = 0.5;

  const double t = 0.37 / gamma;
  const MatrixXc propagated =
      oracle::rk4_linear_ode(sys.drift, x0, t, 4000);
  CHECK(std::abs(propagated(sys.index(1, 1), 0) -
                 std::exp(-gamma * t)) < 1e-10);
  CHECK(std::abs(propagated(sys.index(0, 0), 0) -
                 (1.0 - std::exp(-gamma * t))) < 1e-10);
  CHECK(std::abs(propagated(sys.index(0, 1), 0) -
                 0.5 * std::exp(-0.5 * gamma * t)) < 1e-10);
}

TEST_CASE("driven two-level steady state matches the closed form") {
  const double gamma = units::from_mhz(6.0);
  const LevelScheme scheme = oracle::make_two_level_scheme(gamma);
  DriveParameters drives;
  drives.pump_rabi = units::from_mhz(3.1);
  drives.one_photon_detuning = units::from_mhz(-2.4);
  drives.atom_number = 1.0;
  drives.length = 1.0;
  const LiouvilleSystem sys = build_liouville_system(scheme, drives);

  // the rotating-wave Hamiltonian element is half the configured Rabi
  const double v = 0.5 * drives.pump_rabi;
  const double expected = oracle::two_level_excited_population(
      v, drives.one_photon_detuning, gamma);
  CHECK(std::abs(sys.steady_state(sys.index(1, 1)) - expected) < 1e-10);

  // coherence: rho_ge = V (Delta + i Gamma/2) / (Delta^2 + G^2/4 + 2 V^2).
  // The state vector stores <sigma_ij> = rho_ji, so rho_ge sits at (e, g).
  const Complex coh =
      v * Complex(drives.one_photon_detuning, 0.5 * gamma) /
      (drives.one_photon_detuning * drives.one_photon_detuning +
       0.25 * gamma * gamma + 2.0 * v * v);
  CHECK(std::abs(sys.steady_state(sys.index(1, 0)) - coh) < 1e-10);
}

TEST_CASE("doppler shift moves the effective one-photon detuning") {
  const double gamma = units::from_mhz(6.0);
  const double k = units::two_pi / 794.98e-9;
  const LevelScheme scheme = oracle::make_two_level_scheme(gamma, k);
  DriveParameters drives;
  drives.pump_rabi = units::from_mhz(3.1);
  drives.one_photon_detuning = units::from_mhz(40.0);
  drives.atom_number = 1.0;
  drives.length = 1.0;

  const double v = 17.3;  // m/s, along the propagation axis
  const LiouvilleSystem sys = build_liouville_system(scheme, drives, v);
  const double expected = oracle::two_level_excited_population(
      0.5 * drives.pump_rabi, drives.one_photon_detuning - k * v, gamma);
  CHECK(std::abs(sys.steady_state(sys.index(1, 1)) - expected) < 1e-10);
}

TEST_CASE("five-level steady state is a physical density matrix") {
  const LevelScheme scheme = builtin_scheme("rb-double-lambda");
  const LiouvilleSystem sys = build_liouville_system(scheme, default_drives());
  const int d = sys.dim;
  REQUIRE(d == 5);

  Complex trace = 0.0;
  for (int k = 0; k < d; ++k) trace += sys.steady_state(sys.index(k, k));
  CHECK(std::abs(trace - 1.0) < 1e-12);

  for (int i = 0; i < d; ++i) {
    const Complex pop = sys.steady_state(sys.index(i, i));
    CHECK(std::abs(pop.imag()) < 1e-12);
    CHECK(pop.real() > -1e-12);
    CHECK(pop.real() < 1.0 + 1e-12);
    for (int j = 0; j < d; ++j) {
      const Complex upper = sys.steady_state(sys.index(i, j));
      const Complex lower = sys.steady_state(sys.index(j, i));
      CHECK(std::abs(upper - std::conj(lower)) < 1e-11);
    }
  }

  // residual of the full (unmodified) drift
  const VectorXc residual = sys.drift * sys.steady_state;
  CHECK(residual.cwiseAbs().maxCoeff() <
        1e-10 * sys.drift.cwiseAbs().maxCoeff());
}

TEST_CASE("steady state does not depend on the two-photon detuning") {
  const LevelScheme scheme = builtin_scheme("rb-double-lambda");
  DriveParameters drives = default_drives();
  const LiouvilleSystem base = build_liouville_system(scheme, drives);
  drives.two_photon_detuning = units::from_mhz(9.0);
  const LiouvilleSystem shifted = build_liouville_system(scheme, drives);
  CHECK((base.steady_state - shifted.steady_state).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("trace conservation: population rows, couplings and diffusion") {
  const LevelScheme scheme = builtin_scheme("rb-double-lambda");
  const LiouvilleSystem sys = build_liouville_system(scheme, default_drives());
  const VectorXc u = trace_vector(sys.dim);

  CHECK((u.transpose() * sys.drift).cwiseAbs().maxCoeff() <
        1e-12 * sys.drift.cwiseAbs().maxCoeff());
  CHECK((u.transpose() * sys.field_coupling).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((u.transpose() * sys.diffusion).cwiseAbs().maxCoeff() <
        1e-12 * sys.diffusion.cwiseAbs().maxCoeff());
}

TEST_CASE("ground dissipation rates appear on the expected matrix elements") {
  LevelScheme scheme = builtin_scheme("rb-double-lambda");
  const double gamma_phi = units::from_mhz(0.5);
  const double gamma_x = units::from_mhz(0.3);
  scheme.ground_coherence_decay = gamma_phi;
  scheme.ground_exchange_rate = gamma_x;

  DriveParameters drives;  // all light off, all detunings zero
  drives.atom_number = 1.0;
  drives.length = 1.0;
  const LiouvilleSystem sys = build_liouville_system(scheme, drives);

  // ground-ground coherence damps at gamma_phi + gamma_x with no light
  const int gg = sys.index(0, 1);
  CHECK(std::abs(sys.drift(gg, gg) - Complex(-(gamma_phi + gamma_x), 0.0)) <
        1e-9);
  // exchange feeds populations both ways
  CHECK(std::abs(sys.drift(sys.index(1, 1), sys.index(0, 0)) - gamma_x) <
        1e-9);
  CHECK(std::abs(sys.drift(sys.index(0, 0), sys.index(1, 1)) - gamma_x) <
        1e-9);
  // excited decay splits across the two branches
  const double gamma_e = scheme.levels[2].decay_rate;
  CHECK(std::abs(sys.drift(sys.index(0, 0), sys.index(2, 2)) -
                 0.5 * gamma_e) < 1e-9);
  CHECK(std::abs(sys.drift(sys.index(1, 1), sys.index(2, 2)) -
                 0.5 * gamma_e) < 1e-9);
  CHECK(std::abs(sys.drift(sys.index(2, 2), sys.index(2, 2)) + gamma_e) <
        1e-9);
}

TEST_CASE("diffusion matrix is positive semidefinite in both modes") {
  const LevelScheme scheme = builtin_scheme("rb-double-lambda");
  for (DiffusionKind kind : {DiffusionKind::einstein, DiffusionKind::identity}) {
    const LiouvilleSystem sys =
        build_liouville_system(scheme, default_drives(), 0.0, kind);
    // Negative tolerance scales with the matrix norm: the Einstein matrix
    // carries angular rates ~1e8, so an absolute bound would demand more
    // than double precision can represent.
    const double scale = std::max(1.0, sys.diffusion.cwiseAbs().maxCoeff());
    CHECK(diffusion_min_eigenvalue(sys.diffusion, sys.dim) > -1e-12 * scale);
  }
}

TEST_CASE("identity diffusion is the pair-swap permutation") {
  const LevelScheme scheme = builtin_scheme("rb-double-lambda");
  const LiouvilleSystem sys = build_liouville_system(
      scheme, default_drives(), 0.0, DiffusionKind::identity);
  const int d = sys.dim;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const double expected = (k == j && l == i) ? 1.0 : 0.0;
          CHECK(std::abs(sys.diffusion(sys.index(i, j), sys.index(k, l)) -
                         expected) < 1e-15);
        }
}

TEST_CASE("trace-deflated solve reproduces a known solution") {
  const LevelScheme scheme = builtin_scheme("rb-double-lambda");
  const LiouvilleSystem sys = build_liouville_system(scheme, default_drives());
  // any trace-orthogonal rhs: use the field-coupling columns
  const MatrixXc y = solve_trace_deflated(sys.drift, sys.field_coupling,
                                          sys.dim);
  const VectorXc u = trace_vector(sys.dim);
  // solution columns are trace-free and satisfy M y = rhs on the deflated space
  CHECK((u.transpose() * y).cwiseAbs().maxCoeff() < 1e-10);
  const MatrixXc residual = sys.drift * y - sys.field_coupling;
  CHECK(residual.cwiseAbs().maxCoeff() <
        1e-8 * std::max(1.0, sys.field_coupling.cwiseAbs().maxCoeff()));

  // a rhs with population weight is rejected
  MatrixXc bad = MatrixXc::Zero(sys.dim * sys.dim, 1);
  bad(sys.index(0, 0), 0) = 1.0;
  CHECK_THROWS_AS(solve_trace_deflated(sys.drift, bad, sys.dim),
                  numerical_error);
}

TEST_CASE("inconsistent multiphoton loop is rejected") {
  LevelScheme scheme = builtin_scheme("rb-double-lambda");
  // break the closure: conjugate detuning off by 1 MHz
  for (auto& t : scheme.quantized)
    if (t.mode == QuantizedMode::b) t.detuning.constant += units::from_mhz(1.0);
  CHECK_THROWS_AS(build_liouville_system(scheme, default_drives()),
                  config_error);
}

TEST_CASE("drives without matching transitions are rejected") {
  const LevelScheme bare = builtin_scheme("rb-double-lambda-bare");
  DriveParameters drives = default_drives();  // nonzero dressing_rabi
  CHECK_THROWS_AS(build_liouville_system(bare, drives), config_error);
  drives.dressing_rabi = 0.0;
  CHECK_NOTHROW(build_liouville_system(bare, drives));
}

TEST_CASE("scheme structural validation catches broken schemes") {
  LevelScheme scheme = builtin_scheme("rb-double-lambda");
  scheme.levels[2].branches[0].fraction = 0.7;  // fractions now sum to 1.2
  CHECK_FALSE(scheme.validate().empty());

  LevelScheme decaying_ground = builtin_scheme("rb-double-lambda");
  decaying_ground.levels[0].decay_rate = 1.0;
  CHECK_FALSE(decaying_ground.validate().empty());

  CHECK(builtin_scheme("rb-double-lambda").validate().empty());
  CHECK_THROWS_AS(builtin_scheme("no-such-scheme"), config_error);
}

TEST_CASE("bare scheme equals the dressed scheme with the dressing off") {
  DriveParameters drives = default_drives();
  drives.dressing_rabi = 0.0;
  const LiouvilleSystem full = build_liouville_system(
      builtin_scheme("rb-double-lambda"), drives);
  const LiouvilleSystem bare = build_liouville_system(
      builtin_scheme("rb-double-lambda-bare"), drives);

  // populations and coherences among the shared levels agree
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(full.steady_state(full.index(i, j)) -
                     bare.steady_state(bare.index(i, j))) < 1e-12);
  // the dressing level is empty
  CHECK(std::abs(full.steady_state(full.index(4, 4))) < 1e-14);
}
