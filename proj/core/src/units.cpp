#include "sixwave/units.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace sixwave::units {
namespace {

struct Suffix {
  Dimension dim;
  double scale;
};

const std::map<std::string, Suffix>& suffix_table() {
  static const std::map<std::string, Suffix> table = {
      {"Hz", {Dimension::angular_rate, two_pi}},
      {"kHz", {Dimension::angular_rate, two_pi * 1.0e3}},
      {"MHz", {Dimension::angular_rate, two_pi * 1.0e6}},
      {"GHz", {Dimension::angular_rate, two_pi * 1.0e9}},
      {"rad/s", {Dimension::angular_rate, 1.0}},
      {"m", {Dimension::length, 1.0}},
      {"cm", {Dimension::length, 1.0e-2}},
      {"mm", {Dimension::length, 1.0e-3}},
      {"um", {Dimension::length, 1.0e-6}},
      {"nm", {Dimension::length, 1.0e-9}},
      {"m^2", {Dimension::area, 1.0}},
      {"cm^2", {Dimension::area, 1.0e-4}},
      {"mm^2", {Dimension::area, 1.0e-6}},
      {"K", {Dimension::temperature, 1.0}},
      {"kg", {Dimension::mass, 1.0}},
      {"amu", {Dimension::mass, atomic_mass}},
      {"rad/m", {Dimension::wavenumber, 1.0}},
      {"1/m", {Dimension::wavenumber, 1.0}},
  };
  return table;
}

std::string dimension_name(Dimension dim) {
  switch (dim) {
    case Dimension::angular_rate: return "frequency";
    case Dimension::length: return "length";
    case Dimension::area: return "area";
    case Dimension::temperature: return "temperature";
    case Dimension::mass: return "mass";
    case Dimension::wavenumber: return "wavenumber";
    case Dimension::dimensionless: return "dimensionless";
  }
  return "?";
}

} // namespace

double parse_quantity(const std::string& text, Dimension dim) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end == begin) {
    throw std::invalid_argument("could not parse number in '" + text + "'");
  }
  std::string suffix(end);
  while (!suffix.empty() && std::isspace(static_cast<unsigned char>(suffix.front()))) {
    suffix.erase(suffix.begin());
  }
  while (!suffix.empty() && std::isspace(static_cast<unsigned char>(suffix.back()))) {
    suffix.pop_back();
  }

  if (suffix.empty()) {
    if (dim == Dimension::dimensionless) return value;
    throw std::invalid_argument("quantity '" + text + "' needs a " +
                                dimension_name(dim) +
                                " unit suffix (e.g. \"480 MHz\")");
  }
  auto it = suffix_table().find(suffix);
  if (it == suffix_table().end()) {
    throw std::invalid_argument("unknown unit '" + suffix + "' in '" + text +
                                "'");
  }
  if (it->second.dim != dim) {
    throw std::invalid_argument("unit '" + suffix + "' is not a " +
                                dimension_name(dim) + " unit in '" + text +
                                "'");
  }
  return value * it->second.scale;
}

} // namespace sixwave::units
