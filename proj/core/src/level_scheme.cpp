#include "sixwave/level_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sixwave/errors.hpp"
#include "sixwave/units.hpp"

namespace sixwave {

using units::two_pi;

bool LevelScheme::has_dressing() const {
  return std::any_of(classical.begin(), classical.end(), [](const auto& t) {
    return t.role == ClassicalRole::dressing;
  });
}

namespace {

void check_transition_endpoints(const LevelScheme& s, int lower, int upper,
                                const std::string& what,
                                std::vector<std::string>& out) {
  const int d = s.dimension();
  if (lower < 0 || lower >= d || upper < 0 || upper >= d) {
    out.push_back(what + ": level index out of range");
  } else if (lower == upper) {
    out.push_back(what + ": transition must join two distinct levels");
  }
}

} // namespace

std::vector<std::string> LevelScheme::validate_structure() const {
  std::vector<std::string> out;
  const int d = dimension();
  if (d < 2) out.push_back("scheme needs at least two levels");
  if (hyperfine_splitting < 0) out.push_back("hyperfine splitting must be >= 0");
  if (ground_coherence_decay < 0) out.push_back("ground coherence decay must be >= 0");
  if (ground_exchange_rate < 0) out.push_back("ground exchange rate must be >= 0");
  if (mass < 0) out.push_back("mass must be >= 0");

  int grounds = 0;
  for (int i = 0; i < d; ++i) {
    const Level& lv = levels[i];
    const std::string where = "level " + std::to_string(i + 1);
    if (lv.ground) {
      ++grounds;
      if (lv.decay_rate != 0.0)
        out.push_back(where + ": ground levels must not decay");
    }
    if (lv.decay_rate < 0) out.push_back(where + ": decay rate must be >= 0");
    if (lv.extra_dephasing < 0)
      out.push_back(where + ": extra dephasing must be >= 0");
    if (lv.decay_rate > 0) {
      double sum = 0.0;
      for (const auto& br : lv.branches) {
        if (br.target < 0 || br.target >= d || br.target == i)
          out.push_back(where + ": decay branch target invalid");
        if (br.fraction < 0) out.push_back(where + ": branch fraction < 0");
        sum += br.fraction;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        out.push_back(where + ": branching fractions must sum to 1");
    }
  }
  if (grounds < 1) out.push_back("scheme needs at least one ground level");

  std::set<std::pair<int, int>> used_pairs;
  for (std::size_t t = 0; t < classical.size(); ++t) {
    const auto& tr = classical[t];
    check_transition_endpoints(*this, tr.lower, tr.upper,
                               "classical transition " + std::to_string(t + 1),
                               out);
    if (tr.propagation_sign != 1 && tr.propagation_sign != -1)
      out.push_back("classical transition " + std::to_string(t + 1) +
                    ": propagation sign must be +1 or -1");
    if (tr.wavenumber < 0)
      out.push_back("classical transition " + std::to_string(t + 1) +
                    ": wavenumber must be >= 0");
  }

  int mode_a = 0, mode_b = 0;
  for (std::size_t t = 0; t < quantized.size(); ++t) {
    const auto& tr = quantized[t];
    const std::string where = "quantized transition " + std::to_string(t + 1);
    check_transition_endpoints(*this, tr.lower, tr.upper, where, out);
    if (tr.propagation_sign != 1 && tr.propagation_sign != -1)
      out.push_back(where + ": propagation sign must be +1 or -1");
    if (tr.wavenumber < 0) out.push_back(where + ": wavenumber must be >= 0");
    (tr.mode == QuantizedMode::a ? mode_a : mode_b) += 1;
    auto pair = std::minmax(tr.lower, tr.upper);
    if (!used_pairs.insert({pair.first, pair.second}).second)
      out.push_back(where + ": duplicates another quantized level pair");
  }
  if (mode_a > 1) out.push_back("more than one quantized transition for mode a");
  if (mode_b > 1) out.push_back("more than one quantized transition for mode b");
  return out;
}

std::vector<std::string> LevelScheme::validate() const {
  std::vector<std::string> out = validate_structure();
  int mode_a = 0, mode_b = 0;
  for (const auto& tr : quantized)
    (tr.mode == QuantizedMode::a ? mode_a : mode_b) += 1;
  if (mode_a != 1 || mode_b != 1)
    out.push_back("simulation schemes need exactly two quantized transitions, "
                  "one for mode a and one for mode b");
  return out;
}

namespace {

// 85Rb D1-line double-lambda system with an optional dressing level:
//   1,2: 5S1/2 hyperfine ground pair; 3,4: excited (treated as degenerate);
//   5: dressing level reached from 3 by a counter-propagating drive.
// Detuning map: pump leg 1->3 at Delta, pump leg 2->4 at Delta + omega_hf,
// probe 2->3 at Delta - delta, conjugate 1->4 at Delta + omega_hf + delta,
// dressing 3->5 at Delta_D.
LevelScheme make_double_lambda(bool with_dressing_level) {
  LevelScheme s;
  s.name = with_dressing_level ? "rb-double-lambda" : "rb-double-lambda-bare";
  s.hyperfine_splitting = two_pi * 3.035e9;
  s.ground_coherence_decay = two_pi * 0.5e6;
  s.ground_exchange_rate = two_pi * 0.5e6;
  s.mass = 84.9118 * units::atomic_mass;

  const double gamma_e = two_pi * 5.7e6;
  const double k_pump = two_pi / 794.98e-9;

  s.levels.push_back({"g1", true, 0.0, {}, 0.0});
  s.levels.push_back({"g2", true, 0.0, {}, 0.0});
  s.levels.push_back({"e1", false, gamma_e, {{0, 0.5}, {1, 0.5}}, 0.0});
  s.levels.push_back({"e2", false, gamma_e, {{0, 0.5}, {1, 0.5}}, 0.0});

  ClassicalTransition pump1;
  pump1.lower = 0; pump1.upper = 2; pump1.role = ClassicalRole::pump;
  pump1.detuning.delta_coeff = 1.0;
  pump1.wavenumber = k_pump; pump1.propagation_sign = +1;
  s.classical.push_back(pump1);

  ClassicalTransition pump2;
  pump2.lower = 1; pump2.upper = 3; pump2.role = ClassicalRole::pump;
  pump2.detuning.delta_coeff = 1.0;
  pump2.detuning.hyperfine_coeff = 1.0;
  pump2.wavenumber = k_pump; pump2.propagation_sign = +1;
  s.classical.push_back(pump2);

  QuantizedTransition probe;
  probe.lower = 1; probe.upper = 2; probe.mode = QuantizedMode::a;
  probe.detuning.delta_coeff = 1.0;
  probe.detuning.two_photon_coeff = -1.0;
  probe.wavenumber = k_pump; probe.propagation_sign = +1;
  s.quantized.push_back(probe);

  QuantizedTransition conjugate;
  conjugate.lower = 0; conjugate.upper = 3; conjugate.mode = QuantizedMode::b;
  conjugate.detuning.delta_coeff = 1.0;
  conjugate.detuning.hyperfine_coeff = 1.0;
  conjugate.detuning.two_photon_coeff = 1.0;
  conjugate.wavenumber = k_pump; conjugate.propagation_sign = +1;
  s.quantized.push_back(conjugate);

  if (with_dressing_level) {
    // 5D-type level: its dipole decay path leads through the other
    // fine-structure excited state, which relaxes quickly, so the effective
    // channel drops straight to the two grounds.  The nonzero rate also keeps
    // the pump-only steady state unique at zero dressing power; coherences to
    // this level carry the extra dephasing (drive linewidth + collisions).
    s.levels.push_back(
        {"d", false, two_pi * 0.66e6, {{0, 0.5}, {1, 0.5}}, two_pi * 0.4e6});
    ClassicalTransition dress;
    dress.lower = 2; dress.upper = 4; dress.role = ClassicalRole::dressing;
    dress.detuning.dressing_coeff = 1.0;
    dress.wavenumber = two_pi / 762.0e-9;
    dress.propagation_sign = -1;  // counter-propagating
    s.classical.push_back(dress);
  }
  return s;
}

} // namespace

LevelScheme builtin_scheme(const std::string& name) {
  if (name == "rb-double-lambda") return make_double_lambda(true);
  if (name == "rb-double-lambda-bare") return make_double_lambda(false);
  throw config_error("unknown scheme '" + name + "'");
}

std::vector<std::string> builtin_scheme_names() {
  return {"rb-double-lambda", "rb-double-lambda-bare"};
}

} // namespace sixwave
