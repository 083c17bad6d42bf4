#pragma once

#include <functional>
#include <vector>

#include "sixwave/liouville.hpp"

namespace sixwave {

enum class VelocityQuadrature { gauss_hermite, trapezoid };

/// Discrete velocity classes with Maxwell-Boltzmann weights (1-D along the
/// propagation axis).  Nodes are symmetric about zero and weights sum to 1.
struct VelocityGrid {
  std::vector<double> nodes;    // m/s
  std::vector<double> weights;
  double sigma = 0.0;           // thermal width sqrt(kB T / m)
};

/// Build a velocity grid.  point_count must be odd (>= 3) or 1; temperature
/// 0 or point_count 1 collapse to the single stationary class.  truncation
/// (multiples of sigma) applies to the trapezoid rule only.
VelocityGrid build_velocity_grid(double temperature, double mass,
                                 int point_count,
                                 VelocityQuadrature quadrature =
                                     VelocityQuadrature::gauss_hermite,
                                 double truncation = 4.0);

/// Weighted ensemble average of a per-velocity-class observable.  The
/// reduction runs in grid order (deterministic).  Works for any type with
/// zero-initialized accumulation via operator+= and operator* by double
/// (scalars, Eigen matrices).
template <typename Observable, typename Fn>
Observable doppler_average(const VelocityGrid& grid, Fn&& per_class) {
  Observable acc = per_class(grid.nodes.front()) * grid.weights.front();
  for (std::size_t k = 1; k < grid.nodes.size(); ++k) {
    acc += per_class(grid.nodes[k]) * grid.weights[k];
  }
  return acc;
}

} // namespace sixwave
