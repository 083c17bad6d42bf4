#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sixwave {

/// Symbols a transition detuning may depend on linearly.  Detunings of the
/// individual transitions are linear combinations of the global drive
/// parameters; e.g. the conjugate-mode transition of the built-in scheme
/// carries Delta + omega_hf + delta.
struct DetuningExpr {
  double delta_coeff = 0.0;      // one-photon pump detuning Delta
  double two_photon_coeff = 0.0; // pump-probe two-photon detuning delta
  double dressing_coeff = 0.0;   // dressing detuning Delta_D
  double hyperfine_coeff = 0.0;  // ground hyperfine splitting omega_hf
  double constant = 0.0;         // fixed offset, rad/s

  double evaluate(double delta, double two_photon, double dressing,
                  double hyperfine) const {
    return delta_coeff * delta + two_photon_coeff * two_photon +
           dressing_coeff * dressing + hyperfine_coeff * hyperfine + constant;
  }
};

enum class ClassicalRole { pump, dressing };
enum class QuantizedMode { a, b };

/// One classically driven transition (lower <-> upper level, 0-based).
struct ClassicalTransition {
  int lower = 0;
  int upper = 0;
  ClassicalRole role = ClassicalRole::pump;
  DetuningExpr detuning;
  double wavenumber = 0.0;    // rad/m, magnitude of k
  int propagation_sign = +1;  // +1 along +z, -1 counter-propagating
};

/// One quantized-mode transition (probe 'a' or conjugate 'b').
struct QuantizedTransition {
  int lower = 0;
  int upper = 0;
  QuantizedMode mode = QuantizedMode::a;
  DetuningExpr detuning;
  double wavenumber = 0.0;
  int propagation_sign = +1;
};

/// Spontaneous-decay branch of an excited level.
struct DecayBranch {
  int target = 0;
  double fraction = 1.0;
};

struct Level {
  std::string label;
  bool ground = false;
  double decay_rate = 0.0;            // total spontaneous rate out (rad/s)
  std::vector<DecayBranch> branches;  // fractions must sum to 1 when decaying
  double extra_dephasing = 0.0;       // additional decay of all coherences
                                      // touching this level (rad/s)
};

/// Declarative description of the atomic level structure and which fields
/// couple which level pairs.  Validation rules are enforced by validate().
struct LevelScheme {
  std::string name;
  std::vector<Level> levels;
  double hyperfine_splitting = 0.0;       // rad/s
  double ground_coherence_decay = 0.0;    // pure dephasing between grounds
  double ground_exchange_rate = 0.0;      // symmetric population exchange
  std::vector<ClassicalTransition> classical;
  std::vector<QuantizedTransition> quantized;
  double mass = 0.0;                      // atomic mass, kg

  int dimension() const { return static_cast<int>(levels.size()); }
  bool has_dressing() const;

  /// Full validation for simulation use (requires both quantized modes).
  /// Returns human-readable diagnostics; empty means valid.
  std::vector<std::string> validate() const;

  /// Structural validation only (used by reduced test systems that omit
  /// quantized transitions).
  std::vector<std::string> validate_structure() const;
};

/// Classical drive strengths, global detunings and medium geometry.
struct DriveParameters {
  double pump_rabi = 0.0;          // Omega_0, rad/s (applied to every pump leg)
  double dressing_rabi = 0.0;      // Omega_D, rad/s
  double one_photon_detuning = 0.0;   // Delta
  double two_photon_detuning = 0.0;   // delta
  double dressing_detuning = 0.0;     // Delta_D
  double coupling_a = 0.0;         // g_a, rad/s per unit field
  double coupling_b = 0.0;         // g_b
  double atom_number = 0.0;        // N in the interaction volume
  double length = 0.0;             // medium length, m
  double area = 0.0;               // beam cross-section, m^2
  std::optional<int> pump_sign_override;     // propagation sign overrides
  std::optional<int> dressing_sign_override;
};

/// Built-in schemes.  "rb-double-lambda" is the five-level dressed scheme
/// (two ground hyperfine levels, two excited levels, one dressing level);
/// "rb-double-lambda-bare" is its four-level reduction without the dressing
/// level.
LevelScheme builtin_scheme(const std::string& name);
std::vector<std::string> builtin_scheme_names();

} // namespace sixwave
