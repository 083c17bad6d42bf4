#include "sixwave/doppler.hpp"

#include <cmath>

#include "sixwave/units.hpp"

namespace sixwave {

VelocityGrid build_velocity_grid(double temperature, double mass,
                                 int point_count,
                                 VelocityQuadrature quadrature,
                                 double truncation) {
  if (temperature < 0.0) throw config_error("temperature must be >= 0");
  if (point_count < 1) throw config_error("velocity grid needs >= 1 point");

  VelocityGrid grid;
  if (temperature > 0.0) {
    if (mass <= 0.0)
      throw config_error("velocity averaging needs a positive atomic mass");
    grid.sigma = std::sqrt(units::k_boltzmann * temperature / mass);
  }
  if (point_count == 1 || grid.sigma == 0.0) {
    grid.nodes = {0.0};
    grid.weights = {1.0};
    return grid;
  }
  if (point_count % 2 == 0)
    throw config_error("velocity grid needs an odd point count");

  if (quadrature == VelocityQuadrature::gauss_hermite) {
    // Golub-Welsch: Hermite Jacobi matrix has zero diagonal and off-diagonal
    // sqrt(k/2); eigenvalues are the nodes, squared first eigenvector
    // components the normalized weights.
    const int n = point_count;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double beta = std::sqrt(0.5 * k);
      j(k - 1, k) = beta;
      j(k, k - 1) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    grid.nodes.resize(n);
    grid.weights.resize(n);
    for (int k = 0; k < n; ++k) {
      grid.nodes[k] = std::sqrt(2.0) * grid.sigma * es.eigenvalues()(k);
      const double q0 = es.eigenvectors()(0, k);
      grid.weights[k] = q0 * q0;
    }
  } else {
    if (truncation <= 0.0)
      throw config_error("velocity truncation must be positive");
    const int n = point_count;
    const double vmax = truncation * grid.sigma;
    const double dv = 2.0 * vmax / (n - 1);
    grid.nodes.resize(n);
    grid.weights.resize(n);
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      const double v = -vmax + k * dv;
      const double pdf = std::exp(-0.5 * (v / grid.sigma) * (v / grid.sigma));
      const double coeff = (k == 0 || k == n - 1) ? 0.5 : 1.0;
      grid.nodes[k] = v;
      grid.weights[k] = coeff * pdf;
      total += grid.weights[k];
    }
    for (double& w : grid.weights) w /= total;
  }
  return grid;
}

} // namespace sixwave
