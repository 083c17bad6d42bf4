#include "sixwave/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "sixwave/units.hpp"

namespace sixwave {

using nlohmann::json;

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

namespace {

struct AxisParameter {
  const char* name;
  double DriveParameters::*member;  // nullptr for analysis_frequency
  units::Dimension dimension;
};

constexpr AxisParameter kAxisParameters[] = {
    {"pump_rabi", &DriveParameters::pump_rabi, units::Dimension::angular_rate},
    {"dressing_rabi", &DriveParameters::dressing_rabi,
     units::Dimension::angular_rate},
    {"one_photon_detuning", &DriveParameters::one_photon_detuning,
     units::Dimension::angular_rate},
    {"two_photon_detuning", &DriveParameters::two_photon_detuning,
     units::Dimension::angular_rate},
    {"dressing_detuning", &DriveParameters::dressing_detuning,
     units::Dimension::angular_rate},
    {"coupling_a", &DriveParameters::coupling_a,
     units::Dimension::angular_rate},
    {"coupling_b", &DriveParameters::coupling_b,
     units::Dimension::angular_rate},
    {"atom_number", &DriveParameters::atom_number,
     units::Dimension::dimensionless},
    {"length", &DriveParameters::length, units::Dimension::length},
    {"analysis_frequency", nullptr, units::Dimension::angular_rate},
};

const AxisParameter* find_axis_parameter(const std::string& name) {
  for (const auto& p : kAxisParameters)
    if (name == p.name) return &p;
  return nullptr;
}

std::string axis_column(const AxisParameter& p) {
  if (std::string(p.name) == "two_photon_detuning") return "delta_MHz";
  switch (p.dimension) {
    case units::Dimension::angular_rate:
      return std::string(p.name) + "_MHz";
    case units::Dimension::length:
      return std::string(p.name) + "_m";
    default:
      return p.name;
  }
}

double axis_display(const AxisParameter& p, double value) {
  if (p.dimension == units::Dimension::angular_rate)
    return value / (units::two_pi * 1e6);
  return value;
}

// ---------------------------------------------------------------------------
// Config reading

class ConfigReader {
 public:
  explicit ConfigReader(std::vector<std::string>& diagnostics)
      : diags_(diagnostics) {}

  void error(const std::string& path, const std::string& what) {
    diags_.push_back(path + ": " + what);
  }

  bool ok() const { return diags_.empty(); }

  // Quantity: JSON string with unit suffix ("480 MHz", "0.025 m", ...).
  // Bare numbers are accepted only for dimensionless quantities, so a
  // forgotten unit cannot silently change meaning.
  double quantity(const json& node, const std::string& path,
                  units::Dimension dim, double fallback,
                  bool required = false) {
    if (node.is_null()) {
      if (required) error(path, "required value is missing");
      return fallback;
    }
    if (node.is_number()) {
      if (dim == units::Dimension::dimensionless) return node.get<double>();
      error(path, "needs a unit suffix (e.g. \"480 MHz\"); bare numbers are "
                  "only allowed for dimensionless quantities");
      return fallback;
    }
    if (node.is_string()) {
      try {
        return units::parse_quantity(node.get<std::string>(), dim);
      } catch (const std::exception& e) {
        error(path, e.what());
        return fallback;
      }
    }
    error(path, "expected a number or a quantity string");
    return fallback;
  }

  double number(const json& node, const std::string& path, double fallback,
                bool required = false) {
    if (node.is_null()) {
      if (required) error(path, "required value is missing");
      return fallback;
    }
    if (!node.is_number()) {
      error(path, "expected a number");
      return fallback;
    }
    return node.get<double>();
  }

  bool boolean(const json& node, const std::string& path, bool fallback) {
    if (node.is_null()) return fallback;
    if (!node.is_boolean()) {
      error(path, "expected true or false");
      return fallback;
    }
    return node.get<bool>();
  }

  std::string text(const json& node, const std::string& path,
                   const std::string& fallback, bool required = false) {
    if (node.is_null()) {
      if (required) error(path, "required value is missing");
      return fallback;
    }
    if (!node.is_string()) {
      error(path, "expected a string");
      return fallback;
    }
    return node.get<std::string>();
  }

  void check_keys(const json& node, const std::string& path,
                  std::initializer_list<const char*> known) {
    if (!node.is_object()) return;
    for (const auto& item : node.items()) {
      bool found = false;
      for (const char* k : known)
        if (item.key() == k) {
          found = true;
          break;
        }
      if (!found) error(path + "/" + item.key(), "unknown key");
    }
  }

 private:
  std::vector<std::string>& diags_;
};

json get_or_null(const json& j, const char* key) {
  if (j.is_object() && j.contains(key)) return j.at(key);
  return json();
}

} // namespace

std::optional<RunConfig> load_run_config(
    const std::string& path, std::vector<std::string>& diagnostics) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    diagnostics.push_back(path + ": cannot open file");
    return std::nullopt;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string source = buffer.str();

  json root = json::parse(source, nullptr, false);
  if (root.is_discarded()) {
    diagnostics.push_back(path + ": not valid JSON");
    return std::nullopt;
  }
  if (!root.is_object()) {
    diagnostics.push_back(path + ": top level must be an object");
    return std::nullopt;
  }

  ConfigReader r(diagnostics);
  r.check_keys(root, "",
               {"scheme", "scheme_overrides", "drives", "sweep", "observables",
                "analysis_frequency", "doppler", "diffusion", "detection",
                "probe_photons", "swap_pair_labels", "output"});

  RunConfig cfg;
  cfg.source_text = source;
  cfg.config_digest = fnv1a_hex(source);

  // --- scheme
  const std::string scheme_name =
      r.text(get_or_null(root, "scheme"), "/scheme", "", true);
  if (!scheme_name.empty()) {
    try {
      cfg.scheme = builtin_scheme(scheme_name);
    } catch (const std::exception& e) {
      r.error("/scheme", e.what());
    }
  }

  const json overrides = get_or_null(root, "scheme_overrides");
  if (!overrides.is_null()) {
    r.check_keys(overrides, "/scheme_overrides",
                 {"ground_coherence_decay", "ground_exchange_rate",
                  "hyperfine_splitting", "dressing_dephasing", "mass"});
    cfg.scheme.ground_coherence_decay = r.quantity(
        get_or_null(overrides, "ground_coherence_decay"),
        "/scheme_overrides/ground_coherence_decay",
        units::Dimension::angular_rate, cfg.scheme.ground_coherence_decay);
    cfg.scheme.ground_exchange_rate = r.quantity(
        get_or_null(overrides, "ground_exchange_rate"),
        "/scheme_overrides/ground_exchange_rate",
        units::Dimension::angular_rate, cfg.scheme.ground_exchange_rate);
    cfg.scheme.hyperfine_splitting = r.quantity(
        get_or_null(overrides, "hyperfine_splitting"),
        "/scheme_overrides/hyperfine_splitting",
        units::Dimension::angular_rate, cfg.scheme.hyperfine_splitting);
    cfg.scheme.mass =
        r.quantity(get_or_null(overrides, "mass"), "/scheme_overrides/mass",
                   units::Dimension::mass, cfg.scheme.mass);
    const json dd = get_or_null(overrides, "dressing_dephasing");
    if (!dd.is_null()) {
      const double rate =
          r.quantity(dd, "/scheme_overrides/dressing_dephasing",
                     units::Dimension::angular_rate, 0.0);
      bool applied = false;
      for (const auto& t : cfg.scheme.classical)
        if (t.role == ClassicalRole::dressing) {
          cfg.scheme.levels[t.upper].extra_dephasing = rate;
          applied = true;
        }
      if (!applied)
        r.error("/scheme_overrides/dressing_dephasing",
                "scheme has no dressing transition");
    }
  }

  // --- drives
  const json drives = get_or_null(root, "drives");
  if (drives.is_null()) {
    r.error("/drives", "required section is missing");
  } else {
    r.check_keys(drives, "/drives",
                 {"pump_rabi", "dressing_rabi", "one_photon_detuning",
                  "two_photon_detuning", "dressing_detuning", "coupling_a",
                  "coupling_b", "atom_number", "length", "area", "pump_sign",
                  "dressing_sign"});
    auto q = [&](const char* key, units::Dimension dim, double fallback,
                 bool required = false) {
      return r.quantity(get_or_null(drives, key),
                        std::string("/drives/") + key, dim, fallback,
                        required);
    };
    cfg.drives.pump_rabi =
        q("pump_rabi", units::Dimension::angular_rate, 0.0);
    cfg.drives.dressing_rabi =
        q("dressing_rabi", units::Dimension::angular_rate, 0.0);
    cfg.drives.one_photon_detuning =
        q("one_photon_detuning", units::Dimension::angular_rate, 0.0);
    cfg.drives.two_photon_detuning =
        q("two_photon_detuning", units::Dimension::angular_rate, 0.0);
    cfg.drives.dressing_detuning =
        q("dressing_detuning", units::Dimension::angular_rate, 0.0);
    cfg.drives.coupling_a =
        q("coupling_a", units::Dimension::angular_rate, 0.0);
    cfg.drives.coupling_b =
        q("coupling_b", units::Dimension::angular_rate, 0.0);
    cfg.drives.atom_number =
        q("atom_number", units::Dimension::dimensionless, 0.0, true);
    cfg.drives.length = q("length", units::Dimension::length, 0.0, true);
    cfg.drives.area = q("area", units::Dimension::area, 0.0);
    for (const char* key : {"pump_sign", "dressing_sign"}) {
      const json s = get_or_null(drives, key);
      if (s.is_null()) continue;
      const double v =
          r.number(s, std::string("/drives/") + key, 0.0);
      if (v != 1.0 && v != -1.0) {
        r.error(std::string("/drives/") + key, "must be +1 or -1");
      } else if (std::string(key) == "pump_sign") {
        cfg.drives.pump_sign_override = static_cast<int>(v);
      } else {
        cfg.drives.dressing_sign_override = static_cast<int>(v);
      }
    }
    if (cfg.drives.atom_number <= 0.0)
      r.error("/drives/atom_number", "must be > 0");
    if (cfg.drives.length <= 0.0) r.error("/drives/length", "must be > 0");
  }

  // --- observables
  const json obs = get_or_null(root, "observables");
  if (!obs.is_array() || obs.empty()) {
    r.error("/observables", "needs a non-empty array");
  } else {
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string name =
          r.text(obs.at(i), "/observables/" + std::to_string(i), "");
      if (name == "gain")
        cfg.observables.push_back(Observable::gain);
      else if (name == "intensity_noise")
        cfg.observables.push_back(Observable::intensity_noise);
      else if (name == "duan")
        cfg.observables.push_back(Observable::duan);
      else if (name == "sideband_pairs")
        cfg.observables.push_back(Observable::sideband_pairs);
      else
        r.error("/observables/" + std::to_string(i),
                "unknown observable '" + name + "'");
    }
  }
  const bool needs_noise =
      std::any_of(cfg.observables.begin(), cfg.observables.end(),
                  [](Observable o) { return o != Observable::gain; });

  // --- sweep axes
  const json sweep = get_or_null(root, "sweep");
  bool has_frequency_axis = false;
  if (!sweep.is_null()) {
    r.check_keys(sweep, "/sweep", {"axes"});
    const json axes = get_or_null(sweep, "axes");
    if (!axes.is_null() && !axes.is_array()) {
      r.error("/sweep/axes", "expected an array");
    } else if (axes.is_array()) {
      if (axes.size() > 2) r.error("/sweep/axes", "at most two axes");
      for (std::size_t i = 0; i < axes.size() && i < 2; ++i) {
        const std::string path = "/sweep/axes/" + std::to_string(i);
        const json& a = axes.at(i);
        r.check_keys(a, path, {"parameter", "start", "stop", "points"});
        const std::string pname =
            r.text(get_or_null(a, "parameter"), path + "/parameter", "", true);
        const AxisParameter* p = find_axis_parameter(pname);
        if (!p) {
          if (!pname.empty())
            r.error(path + "/parameter", "unknown parameter '" + pname + "'");
          continue;
        }
        if (pname == "analysis_frequency") {
          if (has_frequency_axis)
            r.error(path, "analysis_frequency can be swept only once");
          has_frequency_axis = true;
        }
        const double start = r.quantity(get_or_null(a, "start"),
                                        path + "/start", p->dimension, 0.0,
                                        true);
        const double stop = r.quantity(get_or_null(a, "stop"), path + "/stop",
                                       p->dimension, start);
        const double points_d =
            r.number(get_or_null(a, "points"), path + "/points", 1.0, true);
        const int points = static_cast<int>(points_d);
        if (points < 1 || points_d != points) {
          r.error(path + "/points", "must be a positive integer");
          continue;
        }
        if (points == 1 && stop != start)
          r.error(path + "/points", "a single-point axis needs stop == start");
        SweepAxis axis;
        axis.name = pname;
        axis.column = axis_column(*p);
        axis.values.resize(points);
        for (int k = 0; k < points; ++k)
          axis.values[k] =
              points == 1
                  ? start
                  : start + (stop - start) * static_cast<double>(k) /
                                static_cast<double>(points - 1);
        cfg.axes.push_back(std::move(axis));
      }
    }
  }
  if (has_frequency_axis && !needs_noise)
    r.error("/sweep", "an analysis_frequency axis needs a noise observable");

  // --- analysis frequency (fixed)
  cfg.analysis_frequency = r.quantity(
      get_or_null(root, "analysis_frequency"), "/analysis_frequency",
      units::Dimension::angular_rate, 0.0,
      /*required=*/needs_noise && !has_frequency_axis);
  if (needs_noise) {
    const double min_freq = units::two_pi * 100.0;  // 100 Hz floor
    if (has_frequency_axis) {
      for (const auto& axis : cfg.axes)
        if (axis.name == "analysis_frequency")
          for (double v : axis.values)
            if (std::abs(v) < min_freq) {
              r.error("/sweep", "analysis frequencies must be >= 100 Hz "
                                "in magnitude");
              break;
            }
    } else if (!get_or_null(root, "analysis_frequency").is_null() &&
               std::abs(cfg.analysis_frequency) < min_freq) {
      r.error("/analysis_frequency", "must be >= 100 Hz in magnitude");
    }
  }

  // --- doppler
  const json dop = get_or_null(root, "doppler");
  if (!dop.is_null()) {
    r.check_keys(dop, "/doppler",
                 {"enabled", "temperature", "points", "quadrature",
                  "truncation"});
    cfg.doppler_enabled =
        r.boolean(get_or_null(dop, "enabled"), "/doppler/enabled", false);
    cfg.temperature =
        r.quantity(get_or_null(dop, "temperature"), "/doppler/temperature",
                   units::Dimension::temperature, 0.0, cfg.doppler_enabled);
    const double pts = r.number(get_or_null(dop, "points"), "/doppler/points",
                                cfg.doppler_enabled ? 0.0 : 1.0,
                                cfg.doppler_enabled);
    cfg.velocity_points = static_cast<int>(pts);
    if (cfg.doppler_enabled &&
        (cfg.velocity_points < 1 || pts != cfg.velocity_points ||
         (cfg.velocity_points > 1 && cfg.velocity_points % 2 == 0)))
      r.error("/doppler/points", "must be 1 or an odd integer >= 3");
    const std::string quad = r.text(get_or_null(dop, "quadrature"),
                                    "/doppler/quadrature", "gauss_hermite");
    if (quad == "gauss_hermite")
      cfg.velocity_quadrature = VelocityQuadrature::gauss_hermite;
    else if (quad == "trapezoid")
      cfg.velocity_quadrature = VelocityQuadrature::trapezoid;
    else
      r.error("/doppler/quadrature",
              "expected 'gauss_hermite' or 'trapezoid'");
    cfg.velocity_truncation = r.number(get_or_null(dop, "truncation"),
                                       "/doppler/truncation", 4.0);
    if (cfg.velocity_truncation <= 0.0)
      r.error("/doppler/truncation", "must be > 0");
    if (cfg.doppler_enabled && cfg.temperature < 0.0)
      r.error("/doppler/temperature", "must be >= 0");
  }

  // --- diffusion
  const std::string diff =
      r.text(get_or_null(root, "diffusion"), "/diffusion", "einstein");
  if (diff == "einstein")
    cfg.diffusion = DiffusionKind::einstein;
  else if (diff == "identity")
    cfg.diffusion = DiffusionKind::identity;
  else
    r.error("/diffusion", "expected 'einstein' or 'identity'");

  // --- detection
  const json det = get_or_null(root, "detection");
  if (!det.is_null()) {
    r.check_keys(det, "/detection", {"eta_a", "eta_b"});
    cfg.efficiency.eta_a =
        r.number(get_or_null(det, "eta_a"), "/detection/eta_a", 1.0);
    cfg.efficiency.eta_b =
        r.number(get_or_null(det, "eta_b"), "/detection/eta_b", 1.0);
    if (cfg.efficiency.eta_a < 0.0 || cfg.efficiency.eta_a > 1.0)
      r.error("/detection/eta_a", "efficiency must lie in [0, 1]");
    if (cfg.efficiency.eta_b < 0.0 || cfg.efficiency.eta_b > 1.0)
      r.error("/detection/eta_b", "efficiency must lie in [0, 1]");
  }

  cfg.probe_photons = r.number(get_or_null(root, "probe_photons"),
                               "/probe_photons", 1.0e6);
  if (cfg.probe_photons <= 0.0) r.error("/probe_photons", "must be > 0");
  cfg.swap_pair_labels = r.boolean(get_or_null(root, "swap_pair_labels"),
                                   "/swap_pair_labels", false);

  // --- output
  const json outp = get_or_null(root, "output");
  if (!outp.is_null()) {
    r.check_keys(outp, "/output", {"path", "format"});
    cfg.output_path = r.text(get_or_null(outp, "path"), "/output/path", "");
    const std::string fmt =
        r.text(get_or_null(outp, "format"), "/output/format", "csv");
    if (fmt == "csv")
      cfg.format = OutputFormat::csv;
    else if (fmt == "json")
      cfg.format = OutputFormat::json;
    else
      r.error("/output/format", "expected 'csv' or 'json'");
  }

  // --- whole-scheme validation
  if (diagnostics.empty()) {
    for (const auto& problem : cfg.scheme.validate())
      r.error("/scheme", problem);
    if (cfg.doppler_enabled && cfg.scheme.mass <= 0.0)
      r.error("/scheme", "velocity averaging needs a positive atomic mass");
  }

  if (!diagnostics.empty()) return std::nullopt;
  return cfg;
}

// ---------------------------------------------------------------------------
// Execution

namespace {

int resolve_thread_count(int requested, std::size_t task_count) {
  int threads = requested;
  if (const char* env = std::getenv("SIXWAVE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1) threads = static_cast<int>(v);
  }
  if (threads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw ? static_cast<int>(hw) : 1;
  }
  return static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(threads),
                            std::max<std::size_t>(task_count, 1)));
}

struct ColumnPlan {
  std::vector<std::string> names;
  bool gain = false;
  bool intensity = false;
  bool duan = false;
  bool pairs = false;
  bool diagnostics = false;
};

ColumnPlan plan_columns(const RunConfig& cfg) {
  ColumnPlan plan;
  for (const auto& axis : cfg.axes) plan.names.push_back(axis.column);
  for (Observable o : cfg.observables) {
    switch (o) {
      case Observable::gain: plan.gain = true; break;
      case Observable::intensity_noise: plan.intensity = true; break;
      case Observable::duan: plan.duan = true; break;
      case Observable::sideband_pairs: plan.pairs = true; break;
    }
  }
  // Column order is fixed (axes, gain, intensity, duan, pairs, diagnostics)
  // and must match the write order in the sweep worker exactly; it does not
  // follow the order observables were listed in.
  if (plan.gain) {
    plan.names.push_back("gain_probe");
    plan.names.push_back("gain_conjugate");
  }
  if (plan.intensity) {
    plan.names.push_back("intensity_sum");
    plan.names.push_back("intensity_diff");
  }
  if (plan.duan) plan.names.push_back("duan");
  if (plan.pairs) {
    for (const char* p : {"pair1", "pair2"}) {
      plan.names.push_back(std::string(p) + "_diff_variance");
      plan.names.push_back(std::string(p) + "_sum_variance");
      plan.names.push_back(std::string(p) + "_duan");
    }
  }
  if (plan.intensity || plan.duan || plan.pairs) {
    plan.diagnostics = true;
    plan.names.push_back("physicality_min_eig");
    plan.names.push_back("hermiticity_error");
    plan.names.push_back("reconstruction_error");
  }
  return plan;
}

std::string format_rate_mhz(double rad_per_s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", rad_per_s / (units::two_pi * 1e6));
  return buf;
}

} // namespace

SweepResult run_sweep(const RunConfig& config, int thread_count) {
  const ColumnPlan plan = plan_columns(config);
  const bool needs_noise = plan.intensity || plan.duan || plan.pairs;

  // Split the axes into the frequency axis (if any) and drive axes.
  int freq_axis = -1;
  for (std::size_t i = 0; i < config.axes.size(); ++i)
    if (config.axes[i].name == "analysis_frequency")
      freq_axis = static_cast<int>(i);

  std::vector<double> omegas;
  if (freq_axis >= 0)
    omegas = config.axes[freq_axis].values;
  else if (needs_noise)
    omegas = {config.analysis_frequency};

  PipelineSettings settings;
  settings.diffusion = config.diffusion;
  settings.alpha_in = std::sqrt(config.probe_photons);
  settings.efficiency = config.efficiency;
  settings.swap_pair_labels = config.swap_pair_labels;
  if (config.doppler_enabled)
    settings.doppler = build_velocity_grid(
        config.temperature, config.scheme.mass, config.velocity_points,
        config.velocity_quadrature, config.velocity_truncation);

  // Drive tasks: cartesian product of the non-frequency axes, in axis order.
  struct DriveAxisRef {
    int axis;
    const AxisParameter* parameter;
  };
  std::vector<DriveAxisRef> drive_axes;
  for (std::size_t i = 0; i < config.axes.size(); ++i) {
    if (static_cast<int>(i) == freq_axis) continue;
    drive_axes.push_back(
        {static_cast<int>(i), find_axis_parameter(config.axes[i].name)});
  }
  std::size_t task_count = 1;
  for (const auto& d : drive_axes)
    task_count *= config.axes[d.axis].values.size();
  std::size_t row_count = task_count * std::max<std::size_t>(omegas.size(), 1);

  SweepResult result;
  result.columns = plan.names;
  result.rows.assign(row_count,
                     std::vector<double>(plan.names.size(), 0.0));

  // Row index for (drive task, frequency index) respecting axis order.
  auto row_index = [&](std::size_t task, std::size_t wi) -> std::size_t {
    if (config.axes.empty()) return 0;
    std::size_t idx[2] = {0, 0};
    std::size_t t = task;
    for (auto it = drive_axes.rbegin(); it != drive_axes.rend(); ++it) {
      const std::size_t n = config.axes[it->axis].values.size();
      idx[it->axis] = t % n;
      t /= n;
    }
    if (freq_axis >= 0) idx[freq_axis] = wi;
    if (config.axes.size() == 1) return idx[0];
    return idx[0] * config.axes[1].values.size() + idx[1];
  };

  std::atomic<std::size_t> next_task{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};

  auto worker = [&]() {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t task = next_task.fetch_add(1);
      if (task >= task_count) return;
      try {
        DriveParameters drives = config.drives;
        std::size_t t = task;
        for (auto it = drive_axes.rbegin(); it != drive_axes.rend(); ++it) {
          const auto& values = config.axes[it->axis].values;
          const std::size_t k = t % values.size();
          t /= values.size();
          drives.*(it->parameter->member) = values[k];
        }

        CarrierPoint carrier;
        std::vector<NoisePoint> points;
        if (needs_noise) {
          points = evaluate_noise_spectrum(config.scheme, drives, omegas,
                                           settings, &carrier);
        } else {
          carrier = evaluate_carrier(config.scheme, drives, settings);
        }

        const std::size_t wn = std::max<std::size_t>(omegas.size(), 1);
        for (std::size_t wi = 0; wi < wn; ++wi) {
          std::vector<double>& row = result.rows[row_index(task, wi)];
          std::size_t col = 0;
          // axis value columns
          {
            std::size_t tt = task;
            std::size_t idx[2] = {0, 0};
            for (auto it = drive_axes.rbegin(); it != drive_axes.rend();
                 ++it) {
              idx[it->axis] = tt % config.axes[it->axis].values.size();
              tt /= config.axes[it->axis].values.size();
            }
            if (freq_axis >= 0) idx[freq_axis] = wi;
            for (std::size_t ai = 0; ai < config.axes.size(); ++ai) {
              const AxisParameter* p =
                  find_axis_parameter(config.axes[ai].name);
              row[col++] =
                  axis_display(*p, config.axes[ai].values[idx[ai]]);
            }
          }
          if (plan.gain) {
            row[col++] = carrier.gain_probe;
            row[col++] = carrier.gain_conjugate;
          }
          if (needs_noise) {
            const NoisePoint& np = points[wi];
            if (plan.intensity) {
              row[col++] = np.intensity.sum_variance;
              row[col++] = np.intensity.diff_variance;
            }
            if (plan.duan) row[col++] = np.duan;
            if (plan.pairs) {
              row[col++] = np.pairs.pair1.diff_variance;
              row[col++] = np.pairs.pair1.sum_variance;
              row[col++] = np.pairs.pair1.duan;
              row[col++] = np.pairs.pair2.diff_variance;
              row[col++] = np.pairs.pair2.sum_variance;
              row[col++] = np.pairs.pair2.duan;
            }
            if (plan.diagnostics) {
              row[col++] = np.diagnostics.min_physicality_eig;
              row[col++] = np.diagnostics.hermiticity_error;
              row[col++] = np.diagnostics.reconstruction_error;
            }
          }
        }
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };

  const int threads = resolve_thread_count(thread_count, task_count);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Provenance.  The timestamp honors SOURCE_DATE_EPOCH so byte-identical
  // outputs can be pinned; everything else is a pure function of the config.
  result.provenance["version"] = version_string;
  result.provenance["schema"] = "1";
  {
    std::time_t now = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
      char* end = nullptr;
      const long long v = std::strtoll(epoch, &end, 10);
      if (end && *end == '\0') now = static_cast<std::time_t>(v);
    }
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    result.provenance["timestamp"] = stamp;
  }
  result.provenance["config_digest"] = config.config_digest;
  result.provenance["scheme"] = config.scheme.name;
  result.provenance["diffusion"] =
      config.diffusion == DiffusionKind::einstein ? "einstein" : "identity";
  result.provenance["doppler"] = config.doppler_enabled ? "on" : "off";
  if (config.doppler_enabled) {
    result.provenance["velocity_points"] =
        std::to_string(config.velocity_points);
    result.provenance["velocity_quadrature"] =
        config.velocity_quadrature == VelocityQuadrature::gauss_hermite
            ? "gauss_hermite"
            : "trapezoid";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", config.temperature);
    result.provenance["temperature_K"] = buf;
  }
  if (needs_noise && freq_axis < 0)
    result.provenance["analysis_frequency_MHz"] =
        format_rate_mhz(config.analysis_frequency);
  {
    std::string names;
    for (const auto& axis : config.axes) {
      if (!names.empty()) names += ",";
      names += axis.name + "[" + std::to_string(axis.values.size()) + "]";
    }
    if (!names.empty()) result.provenance["axes"] = names;
  }
  {
    std::string names;
    for (Observable o : config.observables) {
      if (!names.empty()) names += ",";
      switch (o) {
        case Observable::gain: names += "gain"; break;
        case Observable::intensity_noise: names += "intensity_noise"; break;
        case Observable::duan: names += "duan"; break;
        case Observable::sideband_pairs: names += "sideband_pairs"; break;
      }
    }
    result.provenance["observables"] = names;
  }
  return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  for (const auto& [key, value] : result.provenance)
    out << "# " << key << ": " << value << "\n";
  for (std::size_t c = 0; c < result.columns.size(); ++c)
    out << (c ? "," : "") << result.columns[c];
  out << "\n";
  char buf[40];
  for (const auto& row : result.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      // %.17g round-trips IEEE doubles exactly, so the CSV carries the
      // same bits as the JSON mirror.
      std::snprintf(buf, sizeof buf, "%.17g", row[c]);
      out << (c ? "," : "") << buf;
    }
    out << "\n";
  }
}

void write_json(const SweepResult& result, std::ostream& out) {
  json j;
  j["provenance"] = json::object();
  for (const auto& [key, value] : result.provenance)
    j["provenance"][key] = value;
  j["columns"] = result.columns;
  j["rows"] = json::array();
  for (const auto& row : result.rows) j["rows"].push_back(row);
  out << j.dump(1) << "\n";
}

} // namespace sixwave
