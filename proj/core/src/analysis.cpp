#include "sixwave/analysis.hpp"

#include <cmath>

namespace sixwave {

namespace {

Eigen::Vector4d efficiency_diag(const DetectionEfficiency& eta) {
  if (eta.eta_a < 0.0 || eta.eta_a > 1.0 || eta.eta_b < 0.0 || eta.eta_b > 1.0)
    throw config_error("detection efficiencies must lie in [0, 1]");
  const double ra = std::sqrt(eta.eta_a), rb = std::sqrt(eta.eta_b);
  return {ra, ra, rb, rb};
}

} // namespace

Matrix4c apply_efficiency(const Matrix4c& quadrature,
                          const DetectionEfficiency& eta) {
  const Eigen::Vector4d e = efficiency_diag(eta);
  Matrix4c out = e.asDiagonal() * quadrature * e.asDiagonal();
  for (int i = 0; i < 4; ++i) out(i, i) += 1.0 - e(i) * e(i);
  return out;
}

Matrix8c apply_efficiency_doubled(const Matrix8c& doubled,
                                  const DetectionEfficiency& eta) {
  const Eigen::Vector4d e4 = efficiency_diag(eta);
  Eigen::Matrix<double, 8, 1> e;
  e << e4, e4;
  Matrix8c out = e.asDiagonal() * doubled * e.asDiagonal();
  for (int i = 0; i < 8; ++i) out(i, i) += 1.0 - e(i) * e(i);
  return out;
}

IntensityNoise intensity_noise(const Matrix4c& quadrature, double alpha_mag,
                               double beta_mag, const DetectionEfficiency& eta) {
  const Matrix4c v = apply_efficiency(quadrature, eta);
  // Detected carrier powers carry the efficiencies as well.
  const double pa = eta.eta_a * alpha_mag * alpha_mag;
  const double pb = eta.eta_b * beta_mag * beta_mag;
  const double total = pa + pb;
  if (total <= 0.0)
    throw config_error("intensity noise needs a nonzero detected carrier");
  const double vaa = v(0, 0).real();
  const double vbb = v(2, 2).real();
  const double vab = v(0, 2).real() + v(2, 0).real();  // 2 Re <X_a X_b>_sym
  IntensityNoise out;
  out.sum_variance = (pa * vaa + pb * vbb + std::sqrt(pa * pb) * vab) / total;
  out.diff_variance = (pa * vaa + pb * vbb - std::sqrt(pa * pb) * vab) / total;
  return out;
}

double duan_criterion(const Matrix4c& quadrature,
                      const DetectionEfficiency& eta) {
  const Matrix4c v = apply_efficiency(quadrature, eta);
  const double var_xdiff =
      (v(0, 0) + v(2, 2) - v(0, 2) - v(2, 0)).real();
  const double var_psum = (v(1, 1) + v(3, 3) + v(1, 3) + v(3, 1)).real();
  return 0.5 * (var_xdiff + var_psum);
}

Matrix8c sideband_basis_transform() {
  const Complex h(0.5, 0.0);
  const Complex ih(0.0, 0.5);
  Matrix8c l = Matrix8c::Zero();
  // Upper sidebands recombine Y(+w) with Y(-w); the lower ones mirror them.
  // X^a_+ = (X_a(w) + X_a(-w))/2 + i (P_a(w) - P_a(-w))/2, etc.
  auto fill_mode = [&](int row, int xc, int pc) {
    // rows: row = X_+, row+1 = P_+, row+4 = X_-, row+5 = P_-
    l(row, xc) = h;       l(row, pc) = ih;
    l(row, xc + 4) = h;   l(row, pc + 4) = -ih;
    l(row + 1, xc) = -ih; l(row + 1, pc) = h;
    l(row + 1, xc + 4) = ih; l(row + 1, pc + 4) = h;
    l(row + 4, xc) = h;   l(row + 4, pc) = -ih;
    l(row + 4, xc + 4) = h; l(row + 4, pc + 4) = ih;
    l(row + 5, xc) = ih;  l(row + 5, pc) = h;
    l(row + 5, xc + 4) = -ih; l(row + 5, pc + 4) = h;
  };
  fill_mode(0, 0, 1);  // mode a: X_a, P_a at components 0, 1
  fill_mode(2, 2, 3);  // mode b
  return l;
}

Matrix8d sideband_decomposition(const Matrix8c& doubled,
                                const DetectionEfficiency& eta) {
  const Matrix8c v = apply_efficiency_doubled(doubled, eta);
  const Matrix8c l = sideband_basis_transform();
  const Matrix8c sb = l * v * l.adjoint();
  // Hermitian by construction; the real part carries every quadrature
  // variance and pairwise correlation (the imaginary part is antisymmetric
  // and drops out of any real bilinear form).
  Matrix8d out = sb.real();
  out = 0.5 * (out + out.transpose().eval());
  return out;
}

namespace {

PairMetrics metrics_for(const Matrix8d& v, int xi, int xj, int pi, int pj) {
  PairMetrics m;
  m.diff_variance = v(xi, xi) + v(xj, xj) - 2.0 * v(xi, xj);
  m.sum_variance = v(xi, xi) + v(xj, xj) + 2.0 * v(xi, xj);
  const double psum = v(pi, pi) + v(pj, pj) + 2.0 * v(pi, pj);
  m.duan = 0.5 * (m.diff_variance + psum);
  return m;
}

} // namespace

PairCorrelations pair_correlations(const Matrix8d& sideband_cov,
                                   bool swap_labels) {
  PairCorrelations out;
  // (a_+, b_-): amplitude rows 0 and 6, phase rows 1 and 7.
  const PairMetrics up_down = metrics_for(sideband_cov, 0, 6, 1, 7);
  // (a_-, b_+): amplitude rows 4 and 2, phase rows 5 and 3.
  const PairMetrics down_up = metrics_for(sideband_cov, 4, 2, 5, 3);
  out.pair1 = swap_labels ? down_up : up_down;
  out.pair2 = swap_labels ? up_down : down_up;
  return out;
}

std::pair<double, double> reconstructed_diff_sum(const Matrix8d& sideband_cov) {
  const Matrix8c l = sideband_basis_transform();
  auto variance_of = [&](const Eigen::Matrix<double, 8, 1>& c) {
    const Eigen::Matrix<Complex, 8, 1> w = l.conjugate() * c;
    Complex acc = 0.0;
    for (int r = 0; r < 8; ++r)
      for (int s = 0; s < 8; ++s)
        acc += w(r) * sideband_cov(r, s) * std::conj(w(s));
    return acc.real();
  };
  Eigen::Matrix<double, 8, 1> xdiff = Eigen::Matrix<double, 8, 1>::Zero();
  xdiff(0) = 1.0;
  xdiff(2) = -1.0;
  Eigen::Matrix<double, 8, 1> psum = Eigen::Matrix<double, 8, 1>::Zero();
  psum(1) = 1.0;
  psum(3) = 1.0;
  return {variance_of(xdiff), variance_of(psum)};
}

} // namespace sixwave
