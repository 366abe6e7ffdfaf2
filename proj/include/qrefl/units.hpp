#pragma once

#include <string_view>

namespace qrefl::units {

/// CODATA-2018 recommended values (SI). Every conversion in the project is
/// derived from this table.
namespace codata2018 {
inline constexpr double bohr_radius_m = 5.29177210903e-11;      // a0
inline constexpr double hartree_energy_J = 4.3597447222071e-18;  // Eh
inline constexpr double electron_mass_kg = 9.1093837015e-31;     // me
inline constexpr double hbar_Js = 1.054571817e-34;              // exact in SI 2019
inline constexpr double atomic_mass_constant_kg = 1.66053906660e-27;  // u
inline constexpr double electron_volt_J = 1.602176634e-19;           // exact
}  // namespace codata2018

/// Lab units expressed in SI, for composing inputs such as "23.25 eV A^4".
inline constexpr double angstrom = 1e-10;
inline constexpr double nanometre = 1e-9;
inline constexpr double micrometre = 1e-6;
inline constexpr double microsecond = 1e-6;
inline constexpr double electron_volt = codata2018::electron_volt_J;
inline constexpr double dalton = codata2018::atomic_mass_constant_kg;

enum class Dimension { length, time, velocity, mass, energy, frequency, c4_coefficient };

/// SI base for each dimension: m, s, m/s, kg, J, rad/s, J m^4.
struct PhysicalQuantity {
  double value;
  Dimension dimension;
};

/// Size of one Hartree atomic unit of `d`, in SI.
double atomic_unit_in_si(Dimension d);

/// SI -> Hartree atomic units (hbar = me = a0 = 1).
double to_internal(PhysicalQuantity q);

/// Hartree atomic units -> SI.
PhysicalQuantity from_internal(double value, Dimension d);

Dimension parse_dimension(std::string_view name);
std::string_view dimension_name(Dimension d);

// Shorthands used throughout the config layer.
inline double length_m(double m) { return to_internal({m, Dimension::length}); }
inline double time_s(double s) { return to_internal({s, Dimension::time}); }
inline double velocity_mps(double v) { return to_internal({v, Dimension::velocity}); }
inline double mass_u(double u) { return to_internal({u * dalton, Dimension::mass}); }
inline double energy_eV(double e) { return to_internal({e * electron_volt, Dimension::energy}); }
inline double frequency_radps(double w) { return to_internal({w, Dimension::frequency}); }
inline double c4_eVA4(double c) {
  return to_internal({c * electron_volt * angstrom * angstrom * angstrom * angstrom,
                      Dimension::c4_coefficient});
}

}  // namespace qrefl::units
