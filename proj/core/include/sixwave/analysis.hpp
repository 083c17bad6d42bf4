#pragma once

#include "sixwave/noise.hpp"

namespace sixwave {

using Matrix8c = Eigen::Matrix<Complex, 8, 8>;
using Matrix8d = Eigen::Matrix<double, 8, 8>;

/// Detection efficiencies, applied to covariances as the beam-splitter map
/// V -> E V E + (I - E^2) with E = diag(sqrt(eta_a), ..., sqrt(eta_b), ...).
struct DetectionEfficiency {
  double eta_a = 1.0;
  double eta_b = 1.0;
};

Matrix4c apply_efficiency(const Matrix4c& quadrature,
                          const DetectionEfficiency& eta);
Matrix8c apply_efficiency_doubled(const Matrix8c& doubled,
                                  const DetectionEfficiency& eta);

/// Relative-intensity noise spectra of the summed and subtracted
/// photocurrents, 1 = uncorrelated coherent (shot-noise) level:
///   dI_pm^2 = [|a|^2 Vxx_a + |b|^2 Vxx_b +- 2|a||b| Re Vxx_ab] /
///             (|a|^2 + |b|^2).
struct IntensityNoise {
  double sum_variance = 0.0;
  double diff_variance = 0.0;
};

IntensityNoise intensity_noise(const Matrix4c& quadrature, double alpha_mag,
                               double beta_mag,
                               const DetectionEfficiency& eta = {});

/// Symmetric-combination Duan value (1/2)[Var(X_a - X_b) + Var(P_a + P_b)];
/// separable states satisfy >= 2, vacuum gives exactly 2.
double duan_criterion(const Matrix4c& quadrature,
                      const DetectionEfficiency& eta = {});

/// The 8x8 unitary mapping the stacked symmetric-basis quadratures
/// (Y(+w), Y(-w)) onto the independent-sideband Hermitian quadratures
/// (X^a_+, P^a_+, X^b_+, P^b_+, X^a_-, P^a_-, X^b_-, P^b_-).
/// Entries are exactly representable (+-1/2, +-i/2); L L^dag = I holds with
/// zero floating-point error.
Matrix8c sideband_basis_transform();

/// Independent-sideband covariance: real symmetric 8x8 in the basis above.
Matrix8d sideband_decomposition(const Matrix8c& doubled,
                                const DetectionEfficiency& eta = {});

/// Two-mode correlations of one sideband pairing: variances of the
/// difference/sum of amplitude quadratures and the pairwise Duan value
/// (1/2)[Var(X - X') + Var(P + P')], classical bound 2 for each.
struct PairMetrics {
  double diff_variance = 0.0;
  double sum_variance = 0.0;
  double duan = 0.0;
};

/// Both energy-conserving sideband pairings.  With swap_labels = false,
/// pair1 couples the upper probe sideband with the lower conjugate sideband
/// (a_+, b_-) and pair2 the mirror set (a_-, b_+); swap_labels exchanges the
/// labels.
struct PairCorrelations {
  PairMetrics pair1;
  PairMetrics pair2;
};

PairCorrelations pair_correlations(const Matrix8d& sideband_cov,
                                   bool swap_labels = false);

/// Symmetric-basis variances (Var(X_a - X_b), Var(P_a + P_b)) reconstructed
/// through the inverse sideband transform; equals the direct evaluation from
/// V_out (consistency invariant of the decomposition).
std::pair<double, double> reconstructed_diff_sum(const Matrix8d& sideband_cov);

} // namespace sixwave
