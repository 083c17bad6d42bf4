#pragma once

#include <optional>

#include "sixwave/analysis.hpp"
#include "sixwave/doppler.hpp"
#include "sixwave/level_scheme.hpp"
#include "sixwave/noise.hpp"
#include "sixwave/propagation.hpp"

namespace sixwave {

/// Ensemble carrier observables at one drive-parameter point.  Gains are the
/// weighted averages of the per-class gains; amplitudes are the weighted
/// averages of the per-class output amplitudes (the ensemble mean field,
/// used for the quadrature phase reference and intensity weights).
struct CarrierPoint {
  double gain_probe = 0.0;
  double gain_conjugate = 0.0;
  Complex alpha_out;
  Complex beta_out;
  double phase_a = 0.0;
  double phase_b = 0.0;
};

struct PipelineSettings {
  DiffusionKind diffusion = DiffusionKind::einstein;
  Complex alpha_in = 1.0e3;  // coherent probe seed (|alpha|^2 photons)
  std::optional<VelocityGrid> doppler;  // nullopt = single stationary class
  DetectionEfficiency efficiency;
  bool swap_pair_labels = false;
};

CarrierPoint evaluate_carrier(const LevelScheme& scheme,
                              const DriveParameters& drives,
                              const PipelineSettings& settings);

/// Structural health collected on every computed noise point.
struct NoiseDiagnostics {
  double min_physicality_eig = 0.0;  // min eig of V + i Omega (>= -1e-8)
  double hermiticity_error = 0.0;    // max |V - V^dag|
  double reconstruction_error = 0.0; // sideband basis round trip
};

/// All per-analysis-frequency observables at one drive point.
struct NoisePoint {
  double omega = 0.0;
  IntensityNoise intensity;
  double duan = 0.0;
  PairCorrelations pairs;
  Matrix4c quadrature;   // ensemble V_out(w) before efficiency
  NoiseDiagnostics diagnostics;
};

/// Evaluate the noise observables over a vector of analysis frequencies at
/// fixed drives.  Covariances are averaged over velocity classes in the
/// amplitude basis, then referenced to the ensemble carrier phases; derived
/// scalars (Duan, pair metrics) are computed from the averaged covariance,
/// never averaged themselves.
std::vector<NoisePoint> evaluate_noise_spectrum(
    const LevelScheme& scheme, const DriveParameters& drives,
    const std::vector<double>& omegas, const PipelineSettings& settings,
    CarrierPoint* carrier_out = nullptr);

} // namespace sixwave
