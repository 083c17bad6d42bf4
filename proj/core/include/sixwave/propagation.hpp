#pragma once

#include "sixwave/liouville.hpp"

namespace sixwave {

/// Matrix exponential by scaling-and-squaring with a Pade(13) kernel.
/// Throws numerical_error when the argument is so large the result would
/// overflow (the propagation layer reports the offending z in that case).
MatrixXc matrix_exponential(const MatrixXc& m);

/// Carrier-level field generator: with the atomic sector eliminated
/// adiabatically (dX/dt = 0), the mode vector obeys dA/dz = R A with
///   R = -(N / c) T M^{-1} G,
/// where the inverse is the trace-deflated particular solve.  R acts on
/// (a, a^dag, b, b^dag) and carries the conjugation symmetry
/// R = K conj(R) K with K the (a <-> a^dag, b <-> b^dag) swap.
Matrix4c carrier_generator(const LiouvilleSystem& system);

/// Propagator J(z) = exp(R z) for the carrier equations.
struct FieldPropagator {
  Matrix4c generator;  // R
  Matrix4c transfer;   // J(z)
  double z = 0.0;
};

FieldPropagator make_propagator(const Matrix4c& generator, double z);

/// Carrier solution through the medium for a coherent probe seed alpha and
/// vacuum conjugate input: amplitudes, intensity gains and output phases.
struct CarrierSolution {
  Complex alpha_out;   // probe amplitude at z
  Complex beta_out;    // conjugate amplitude at z
  double gain_probe = 0.0;
  double gain_conjugate = 0.0;
  double phase_a = 0.0;  // arg(alpha_out), 0 when the amplitude vanishes
  double phase_b = 0.0;
};

/// Photon-number gains via the coherent-input second-moment matrix
///   C(z) = J <A(0) A(0)^T> J(z)^T,
/// with <A(0)A(0)^T> the coherent/vacuum input table (the spontaneous "+1"
/// terms are retained exactly).  gain_probe = <a^dag a>(z) / |alpha|^2,
/// gain_conjugate = <b^dag b>(z) / |alpha|^2.
CarrierSolution solve_carrier(const Matrix4c& generator, double z,
                              Complex alpha_in);

/// Stimulated-only gain |J11 alpha + J12 conj(alpha)|^2 / |alpha|^2 (and the
/// b-row analogue); used to document the intense-seed approximation against
/// the exact second-moment gains.
std::pair<double, double> stimulated_gains(const FieldPropagator& prop,
                                           Complex alpha_in);

} // namespace sixwave
