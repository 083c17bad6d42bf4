#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sixwave/pipeline.hpp"

namespace sixwave {

enum class Observable { gain, intensity_noise, duan, sideband_pairs };
enum class OutputFormat { csv, json };

/// One sweep axis: a DriveParameters field name or "analysis_frequency",
/// linearly spaced (values stored in internal units, rad/s).
struct SweepAxis {
  std::string name;
  std::vector<double> values;
  std::string column;  // output column name, e.g. "delta_MHz"
};

/// Fully resolved run description (one simulation = one output table).
struct RunConfig {
  LevelScheme scheme;
  DriveParameters drives;
  std::vector<SweepAxis> axes;           // 0, 1 or 2 axes
  std::vector<Observable> observables;
  double analysis_frequency = 0.0;       // rad/s, when not swept
  bool doppler_enabled = false;
  double temperature = 0.0;
  int velocity_points = 0;
  VelocityQuadrature velocity_quadrature = VelocityQuadrature::gauss_hermite;
  double velocity_truncation = 4.0;
  DiffusionKind diffusion = DiffusionKind::einstein;
  DetectionEfficiency efficiency;
  double probe_photons = 1.0e6;          // |alpha_in|^2
  bool swap_pair_labels = false;
  std::string output_path;
  OutputFormat format = OutputFormat::csv;
  std::string config_digest;             // FNV-1a of the config text
  std::string source_text;               // raw config (for provenance)
};

/// Parse + validate a config file.  diagnostics collects every problem found
/// (JSON-pointer style paths); returns nullopt when any error is fatal.
std::optional<RunConfig> load_run_config(const std::string& path,
                                         std::vector<std::string>& diagnostics);

/// Result table: one row per grid point, column-major provenance attached.
struct SweepResult {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, std::string> provenance;
};

/// Execute a run on the calling thread or a worker pool.  thread_count <= 0
/// picks the hardware concurrency (the SIXWAVE_THREADS environment variable
/// overrides any value).  Grid evaluation order and reductions are fixed, so
/// results are bit-identical across thread counts.
SweepResult run_sweep(const RunConfig& config, int thread_count = 0);

void write_csv(const SweepResult& result, std::ostream& out);
void write_json(const SweepResult& result, std::ostream& out);

/// Stable 64-bit FNV-1a digest used in output provenance.
std::string fnv1a_hex(const std::string& text);

inline constexpr const char* version_string = "0.1.0";

} // namespace sixwave
