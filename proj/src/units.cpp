#include "qrefl/units.hpp"

#include <string>

#include "qrefl/errors.hpp"

namespace qrefl::units {
namespace {

constexpr double kLength = codata2018::bohr_radius_m;
constexpr double kEnergy = codata2018::hartree_energy_J;
constexpr double kTime = codata2018::hbar_Js / codata2018::hartree_energy_J;
constexpr double kMass = codata2018::electron_mass_kg;

}  // namespace

double atomic_unit_in_si(Dimension d) {
  switch (d) {
    case Dimension::length:
      return kLength;
    case Dimension::time:
      return kTime;
    case Dimension::velocity:
      return kLength / kTime;
    case Dimension::mass:
      return kMass;
    case Dimension::energy:
      return kEnergy;
    case Dimension::frequency:
      return 1.0 / kTime;
    case Dimension::c4_coefficient:
      return kEnergy * kLength * kLength * kLength * kLength;
  }
  throw ConfigError("unsupported dimension " + std::to_string(static_cast<int>(d)));
}

double to_internal(PhysicalQuantity q) { return q.value / atomic_unit_in_si(q.dimension); }

PhysicalQuantity from_internal(double value, Dimension d) {
  return {value * atomic_unit_in_si(d), d};
}

Dimension parse_dimension(std::string_view name) {
  if (name == "length") return Dimension::length;
  if (name == "time") return Dimension::time;
  if (name == "velocity") return Dimension::velocity;
  if (name == "mass") return Dimension::mass;
  if (name == "energy") return Dimension::energy;
  if (name == "frequency") return Dimension::frequency;
  if (name == "c4" || name == "c4_coefficient") return Dimension::c4_coefficient;
  throw ConfigError("unsupported dimension '" + std::string(name) + "'");
}

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::length:
      return "length";
    case Dimension::time:
      return "time";
    case Dimension::velocity:
      return "velocity";
    case Dimension::mass:
      return "mass";
    case Dimension::energy:
      return "energy";
    case Dimension::frequency:
      return "frequency";
    case Dimension::c4_coefficient:
      return "c4_coefficient";
  }
  throw ConfigError("unsupported dimension " + std::to_string(static_cast<int>(d)));
}

}  // namespace qrefl::units
