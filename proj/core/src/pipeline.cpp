#include "sixwave/pipeline.hpp"

#include <cmath>

namespace sixwave {

namespace {

VelocityGrid single_class_grid() {
  VelocityGrid g;
  g.nodes = {0.0};
  g.weights = {1.0};
  return g;
}

struct ClassCarrier {
  CarrierSolution solution;
  double weight = 0.0;
};

CarrierPoint reduce_carrier(const std::vector<ClassCarrier>& classes) {
  CarrierPoint out;
  Complex alpha = 0.0, beta = 0.0;
  for (const auto& c : classes) {
    out.gain_probe += c.weight * c.solution.gain_probe;
    out.gain_conjugate += c.weight * c.solution.gain_conjugate;
    alpha += c.weight * c.solution.alpha_out;
    beta += c.weight * c.solution.beta_out;
  }
  out.alpha_out = alpha;
  out.beta_out = beta;
  out.phase_a = std::abs(alpha) > 0.0 ? std::arg(alpha) : 0.0;
  out.phase_b = std::abs(beta) > 0.0 ? std::arg(beta) : 0.0;
  return out;
}

} // namespace

CarrierPoint evaluate_carrier(const LevelScheme& scheme,
                              const DriveParameters& drives,
                              const PipelineSettings& settings) {
  const VelocityGrid grid =
      settings.doppler ? *settings.doppler : single_class_grid();
  std::vector<ClassCarrier> classes;
  classes.reserve(grid.nodes.size());
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    const LiouvilleSystem system = build_liouville_system(
        scheme, drives, grid.nodes[k], settings.diffusion);
    const Matrix4c r = carrier_generator(system);
    classes.push_back(
        {solve_carrier(r, drives.length, settings.alpha_in), grid.weights[k]});
  }
  return reduce_carrier(classes);
}

std::vector<NoisePoint> evaluate_noise_spectrum(
    const LevelScheme& scheme, const DriveParameters& drives,
    const std::vector<double>& omegas, const PipelineSettings& settings,
    CarrierPoint* carrier_out) {
  const VelocityGrid grid =
      settings.doppler ? *settings.doppler : single_class_grid();
  const std::size_t n_omega = omegas.size();
  const std::size_t n_class = grid.nodes.size();

  std::vector<Matrix4c> s_plus(n_omega, Matrix4c::Zero());
  std::vector<Matrix4c> s_minus(n_omega, Matrix4c::Zero());
  std::vector<ClassCarrier> classes;
  classes.reserve(n_class);

  const Matrix4c input = vacuum_input_covariance();
  for (std::size_t k = 0; k < n_class; ++k) {
    const LiouvilleSystem system = build_liouville_system(
        scheme, drives, grid.nodes[k], settings.diffusion);
    const Matrix4c r = carrier_generator(system);
    classes.push_back(
        {solve_carrier(r, drives.length, settings.alpha_in), grid.weights[k]});

    const ResponseSolver solver(system);
    for (std::size_t w = 0; w < n_omega; ++w) {
      const ResponseMatrices response = solver.at(omegas[w]);
      const auto [sp, sm] =
          integrate_spectral_ode(response, drives.length, input);
      s_plus[w] += grid.weights[k] * sp;
      s_minus[w] += grid.weights[k] * sm;
    }
  }

  const CarrierPoint carrier = reduce_carrier(classes);
  if (carrier_out) *carrier_out = carrier;
  const double alpha_mag = std::abs(carrier.alpha_out);
  const double beta_mag = std::abs(carrier.beta_out);

  std::vector<NoisePoint> out(n_omega);
  for (std::size_t w = 0; w < n_omega; ++w) {
    const SpectralCovariance cov = assemble_covariance(
        omegas[w], s_plus[w], s_minus[w], carrier.phase_a, carrier.phase_b);
    NoisePoint& p = out[w];
    p.omega = omegas[w];
    p.quadrature = cov.quadrature;
    p.intensity =
        intensity_noise(cov.quadrature, alpha_mag, beta_mag,
                        settings.efficiency);
    p.duan = duan_criterion(cov.quadrature, settings.efficiency);
    p.pairs = pair_correlations(
        sideband_decomposition(cov.doubled, settings.efficiency),
        settings.swap_pair_labels);

    // Structural diagnostics, all at unit efficiency.
    const Matrix4c& v = cov.quadrature;
    p.diagnostics.hermiticity_error = (v - v.adjoint()).cwiseAbs().maxCoeff();
    Matrix4c herm = 0.5 * (v + v.adjoint());
    Matrix4c omega_comm = Matrix4c::Zero();
    omega_comm(0, 1) = 1.0;
    omega_comm(1, 0) = -1.0;
    omega_comm(2, 3) = 1.0;
    omega_comm(3, 2) = -1.0;
    const Matrix4c phys = herm + Complex(0.0, 1.0) * omega_comm;
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(phys, Eigen::EigenvaluesOnly);
    p.diagnostics.min_physicality_eig = es.eigenvalues().minCoeff();

    const Matrix8d sb = sideband_decomposition(cov.doubled);
    const auto [rec_diff, rec_sum] = reconstructed_diff_sum(sb);
    const double direct_diff =
        (v(0, 0) + v(2, 2) - v(0, 2) - v(2, 0)).real();
    const double direct_sum =
        (v(1, 1) + v(3, 3) + v(1, 3) + v(3, 1)).real();
    p.diagnostics.reconstruction_error = std::max(
        std::abs(rec_diff - direct_diff), std::abs(rec_sum - direct_sum));
  }
  return out;
}

} // namespace sixwave
