// Command-line front end: run sweeps from JSON configs, validate configs,
// list the built-in level schemes.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sixwave/errors.hpp"
#include "sixwave/level_scheme.hpp"
#include "sixwave/sweep.hpp"

namespace {

int run_simulate(const std::string& config_path, const std::string& out_path,
                 const std::string& format, int threads, bool no_doppler) {
  std::vector<std::string> diagnostics;
  auto cfg = sixwave::load_run_config(config_path, diagnostics);
  if (!cfg) {
    std::cerr << "config error(s) in " << config_path << ":\n";
    for (const auto& d : diagnostics) std::cerr << "  " << d << "\n";
    return 2;
  }
  if (!out_path.empty()) cfg->output_path = out_path;
  if (!format.empty())
    cfg->format = format == "json" ? sixwave::OutputFormat::json
                                   : sixwave::OutputFormat::csv;
  if (no_doppler) cfg->doppler_enabled = false;

  const sixwave::SweepResult result = sixwave::run_sweep(*cfg, threads);

  if (cfg->output_path.empty()) {
    if (cfg->format == sixwave::OutputFormat::json)
      sixwave::write_json(result, std::cout);
    else
      sixwave::write_csv(result, std::cout);
  } else {
    std::ofstream out(cfg->output_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot open output file " << cfg->output_path << "\n";
      return 1;
    }
    if (cfg->format == sixwave::OutputFormat::json)
      sixwave::write_json(result, out);
    else
      sixwave::write_csv(result, out);
    std::cerr << "wrote " << result.rows.size() << " rows ("
              << result.columns.size() << " columns) to " << cfg->output_path
              << "\n";
  }
  return 0;
}

int run_validate(const std::string& config_path) {
  std::vector<std::string> diagnostics;
  auto cfg = sixwave::load_run_config(config_path, diagnostics);
  if (!cfg) {
    std::cerr << "invalid: " << config_path << "\n";
    for (const auto& d : diagnostics) std::cerr << "  " << d << "\n";
    return 2;
  }
  std::size_t rows = 1;
  for (const auto& axis : cfg->axes) rows *= axis.values.size();
  std::cout << "ok: scheme=" << cfg->scheme.name
            << " levels=" << cfg->scheme.dimension() << " axes=";
  if (cfg->axes.empty()) {
    std::cout << "none";
  } else {
    for (std::size_t i = 0; i < cfg->axes.size(); ++i)
      std::cout << (i ? "," : "") << cfg->axes[i].name << "["
                << cfg->axes[i].values.size() << "]";
  }
  std::cout << " rows=" << rows
            << " doppler=" << (cfg->doppler_enabled ? "on" : "off") << "\n";
  return 0;
}

int run_schemes() {
  for (const auto& name : sixwave::builtin_scheme_names()) {
    const sixwave::LevelScheme scheme = sixwave::builtin_scheme(name);
    std::cout << name << ": " << scheme.dimension() << " levels, "
              << scheme.classical.size() << " classical drive(s), "
              << scheme.quantized.size() << " quantized mode(s)"
              << (scheme.has_dressing() ? ", dressed" : "") << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dressed multiwave-mixing simulator: gain, quantum noise and "
               "entanglement spectra for a driven multilevel vapour"};
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  int threads = 0;
  bool no_doppler = false;

  CLI::App* simulate =
      app.add_subcommand("simulate", "Run a sweep described by a JSON config");
  simulate->add_option("config", config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--out", out_path,
                       "Output file (default: the config's output.path, or "
                       "stdout)");
  simulate->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->add_option("--threads", threads,
                       "Worker threads (default: hardware concurrency; the "
                       "SIXWAVE_THREADS environment variable overrides)");
  simulate->add_flag("--no-doppler", no_doppler,
                     "Force single stationary velocity class");

  CLI::App* validate =
      app.add_subcommand("validate", "Check a config and report every problem");
  std::string validate_path;
  validate->add_option("config", validate_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);

  app.add_subcommand("schemes", "List built-in level schemes");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return run_simulate(config_path, out_path, format, threads, no_doppler);
    if (validate->parsed()) return run_validate(validate_path);
    return run_schemes();
  } catch (const sixwave::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const sixwave::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
