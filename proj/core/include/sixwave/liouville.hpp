#pragma once

#include <Eigen/Dense>
#include <complex>

#include "sixwave/errors.hpp"
#include "sixwave/level_scheme.hpp"

namespace sixwave {

using Complex = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

enum class DiffusionKind { einstein, identity };

/// Linearized atomic sector at one velocity class.
///
/// The atomic operator vector X stacks the d^2 transition operators
/// sigma_ij row-major: index(i,j) = i*d + j, 0-based.  Dynamics:
///   dX/dt = M X + G A + F,
/// with A = (a, a^dag, b, b^dag) the quantized-mode vector, M the drift of
/// the classically driven system (pump and dressing only), G the coupling of
/// the quantized modes evaluated at the pump-only steady state, and F the
/// Langevin forces with <F_mu(t) F_nu(t')> = D_munu delta(t - t').
/// The field propagates as (d_t + c d_z) A = N T X.
struct LiouvilleSystem {
  int dim = 0;              // number of levels d
  double velocity = 0.0;    // velocity class this system was built for (m/s)
  MatrixXc drift;           // M, d^2 x d^2
  VectorXc steady_state;    // X_s with M X_s = 0, trace 1
  MatrixXc field_coupling;  // G, d^2 x 4
  MatrixXc source;          // T, 4 x d^2 (nonzero only on the quantized
                            // transition coherence columns)
  MatrixXc diffusion;       // D, d^2 x d^2
  DiffusionKind diffusion_kind = DiffusionKind::einstein;
  double atom_number = 0.0;
  double length = 0.0;

  int index(int i, int j) const { return i * dim + j; }
};

/// Assemble M for the classically driven scheme at one velocity class.
/// Doppler shifts enter through the per-transition wavenumbers and
/// propagation signs: each field frequency seen by the moving atom is
/// shifted by -sign * k * v.
///
/// Throws config_error when the scheme/drive combination is inconsistent
/// (e.g. nonzero dressing Rabi frequency without a dressing transition).
LiouvilleSystem build_liouville_system(const LevelScheme& scheme,
                                       const DriveParameters& drives,
                                       double velocity = 0.0,
                                       DiffusionKind diffusion_kind =
                                           DiffusionKind::einstein);

/// Solve M X_s = 0 with unit trace by replacing the redundant population row
/// with the trace constraint.  Throws numerical_error when the steady state
/// is degenerate or the solve does not converge to a physical state.
VectorXc solve_pump_steady_state(const MatrixXc& drift, int dim);

/// Diffusion matrix of the Langevin forces.
///  * einstein: generalized Einstein relation D = -(M S + S M^T) with
///    S_(mn),(kl) = delta_nk X_s[m*d+l] the operator-product contraction at
///    the pump-only steady state.  Positive semidefinite under the
///    Hermitian-pairing reordering (see diffusion_min_eigenvalue).
///  * identity: the white correlator <F_ij F_nm> = delta_(ij),(nm) on the
///    conjugate index pairing (nm) = (ji), i.e. D equals the pair-swap
///    permutation matrix.
MatrixXc build_diffusion_matrix(const MatrixXc& drift,
                                const VectorXc& steady_state, int dim,
                                DiffusionKind kind);

/// Smallest eigenvalue of the Hermitian-pairing reordering P*D (P maps
/// component (i,j) to (j,i)); >= -tol for a physical diffusion matrix.
double diffusion_min_eigenvalue(const MatrixXc& diffusion, int dim);

/// Trace-deflated solve of M Y = B restricted to the trace-zero subspace:
/// the population rows of M are linearly dependent (trace preservation), so
/// the redundant row is replaced by the constraint u^T Y = 0.  Every column
/// of B must be trace-orthogonal (sum of population components zero), which
/// holds for the field-coupling columns by construction.
MatrixXc solve_trace_deflated(const MatrixXc& drift, const MatrixXc& rhs,
                              int dim);

} // namespace sixwave
