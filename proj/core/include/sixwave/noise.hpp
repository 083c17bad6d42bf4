#pragma once

#include "sixwave/liouville.hpp"
#include "sixwave/propagation.hpp"

namespace sixwave {

/// Frequency-domain generators of the linearized fluctuation propagation
///   d(dA)/dz = R(w) dA + R_F(w) F,
/// with R(w) = -(N/c) T (i w I + M)^{-1} G + i (w/c) I and
/// R_F(w) = -(N/c) T (i w I + M)^{-1}.  The source matrix packs the Langevin
/// drive Q(w) = (c/N) R_F(w) D R_F(-w)^T appearing in the covariance ODE;
/// the c/N factor absorbs the ensemble force normalization so vacuum input
/// stays exactly at shot noise through lossy or amplifying propagation when
/// the Einstein diffusion matrix is used.
struct ResponseMatrices {
  double omega = 0.0;   // analysis frequency (rad/s), sign included
  Matrix4c generator;   // R(+w)
  Matrix4c generator_minus; // R(-w)
  Matrix4c source;      // Q(+w)
  Matrix4c source_minus;    // Q(-w)
};

/// Direct (LU) evaluation at one analysis frequency.
ResponseMatrices response_matrices(const LiouvilleSystem& system,
                                   double omega);

/// Pre-reduced solver for many analysis frequencies against one system:
/// performs a Hessenberg reduction of M once, then each frequency costs
/// O(n^2).  Results agree with response_matrices to solver precision.
class ResponseSolver {
 public:
  explicit ResponseSolver(const LiouvilleSystem& system);
  ResponseMatrices at(double omega) const;

 private:
  const LiouvilleSystem* system_;
  MatrixXc hess_;    // H = Q^dag M Q, upper Hessenberg
  MatrixXc q_;       // unitary Q
  MatrixXc tq_;      // T Q (for recovering the 4x4 projections)
  MatrixXc rhs_g_;   // Q^dag G
  MatrixXc rhs_t_;   // Q^T T^T (right-hand sides of the transposed solves)
};

/// Spectral covariance of the mode fluctuations, normalized so that vacuum
/// input gives S entries at the shot-noise level (the <a a^dag> entry is 1).
/// S(z, w) solves dS/dz = R(w) S + S R(-w)^T + Q(w) with S(0, w) the input
/// covariance (vacuum by default); evaluated by adaptive integration of the
/// matrix ODE.
struct SpectralCovariance {
  double omega = 0.0;
  Matrix4c amplitude;        // S(z, +w) in the (a, a^dag, b, b^dag) basis
  Matrix4c amplitude_minus;  // S(z, -w)
  Matrix4c quadrature;       // V_out(w), Hermitian
  Eigen::Matrix<Complex, 8, 8> doubled; // covariance of (Y(+w), Y(-w))
};

/// Vacuum/coherent input covariance (the fluctuation part of any coherent
/// state): <a a^dag> = <b b^dag> = 1, all other second moments zero.
Matrix4c vacuum_input_covariance();

/// Quadrature transform U(z) built from the carrier output phases;
/// U U^dag = 2 I.  Maps (a, a^dag, b, b^dag) to (X_a, P_a, X_b, P_b).
Matrix4c quadrature_transform(double phase_a, double phase_b);

/// Integrate dS/dz = R S + S R(-w)^T + Q from 0 to z for both frequency
/// branches (adaptive embedded Runge-Kutta; throws numerical_error with step
/// diagnostics when the step size underflows).  Returns (S(z,+w), S(z,-w)).
std::pair<Matrix4c, Matrix4c> integrate_spectral_ode(
    const ResponseMatrices& response, double z, const Matrix4c& input);

/// Assemble the quadrature-basis output covariance from amplitude-basis
/// spectra:
///   V(w) = (W(w) + W(-w)^T)/2,  W(w) = U S(z, w) U^T,
/// plus the doubled 8x8 covariance blockdiag(V(w), V(-w)) of the stacked
/// quadrature vector (Y(w), Y(-w)) used by the sideband decomposition (the
/// cross blocks <Y(w) Y(w)^T> vanish for a stationary process and are
/// assembled as structural zeros).
SpectralCovariance assemble_covariance(double omega, const Matrix4c& s_plus,
                                       const Matrix4c& s_minus, double phase_a,
                                       double phase_b);

/// Full per-velocity-class evaluation: ODE integration plus assembly.
SpectralCovariance noise_covariance(const ResponseMatrices& response,
                                    double z, double phase_a, double phase_b,
                                    const Matrix4c& input_covariance =
                                        vacuum_input_covariance());

/// Quadrature-only oracle entry point: accumulated source integral
///   S_F(z,w) = int_0^z e^{R(w)(z-s)} Q(w) e^{R(-w)^T (z-s)} ds
/// by composite Gauss quadrature (test oracle for the ODE path).
Matrix4c source_integral_quadrature(const ResponseMatrices& response,
                                    double z, int panels);

} // namespace sixwave
