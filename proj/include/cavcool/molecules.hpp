#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cavcool/model.hpp"

namespace cavcool {

namespace si {
inline constexpr double c = 299792458.0;               // m/s
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double epsilon0 = 8.8541878128e-12;   // F/m
inline constexpr double atomic_dipole = 8.4783536255e-30;  // e a0 in C m
inline constexpr double amu = 1.66053906660e-27;       // kg
inline constexpr double pi = 3.14159265358979323846;
}  // namespace si

struct MoleculeSpec {
  std::string name;
  std::string point_group;
  std::string irrep;
  double wavenumber = 0.0;  // cm^-1
  double dipole = 0.0;      // atomic units
  double gamma_si = 0.0;    // s^-1, tabulated Einstein A
  double mass = 0.0;        // amu

  /// Throws std::invalid_argument unless wavenumber > 0, dipole >= 0, mass > 0.
  void validate() const;
};

struct TrapSpec {
  double nu_si = 2.0 * si::pi * 350e3;  // rad/s
  double depth_uk = 900.0;              // informational
  double wavelength_nm = 532.0;         // informational
};

struct CavitySpec {
  double field_amplitude = 150.0;      // V/m
  double kappa_si = 2.0 * si::pi * 5e6;  // rad/s
};

struct DriveSpec {
  double omega = 0.05;  // all in units of nu
  double delta = -1.0;
  double delta_c = -10.0;
};

struct GeometrySpec {
  double phi = si::pi / 4;
  double theta_l = si::pi / 4;
  double theta_c = si::pi / 4;
};

/// Spontaneous emission rate gamma = w^3 mu^2 / (3 pi eps0 hbar c^3) [s^-1]
/// with w = 2 pi c * wavenumber.
double einstein_a(double wavenumber_cm1, double dipole_au);

/// eta = sqrt(hbar k^2 / (2 M nu)) with k = 2 pi * wavenumber.
double lamb_dicke(double wavenumber_cm1, double mass_amu, double nu_si);

/// Vacuum Rabi frequency g = mu eps_c / (2 hbar) [rad/s].
double vacuum_rabi(double dipole_au, double field_amplitude);

/// C1 = g^2 / (kappa gamma); any consistent unit system.
double cooperativity(double g, double kappa, double gamma);

/// Dimensionless model parameters. gamma comes from the tabulated Einstein
/// coefficient (falling back to einstein_a when the table entry is 0).
ModelParams to_model_params(const MoleculeSpec& molecule, const TrapSpec& trap, const CavitySpec& cavity,
                            const DriveSpec& drive = {}, const GeometrySpec& geometry = {});

/// Parses whitespace-separated rows: name point_group irrep wavenumber_cm1
/// dipole_au gamma_s1 mass_amu. '#' starts a comment. Throws ConfigError
/// with the offending line number.
std::vector<MoleculeSpec> parse_molecule_table(std::string_view text);

std::vector<MoleculeSpec> load_molecule_table(const std::filesystem::path& path);

/// Location of the bundled table.
std::filesystem::path default_molecule_table_path();

/// Case-sensitive lookup; throws ConfigError when absent.
const MoleculeSpec& find_molecule(const std::vector<MoleculeSpec>& table, std::string_view name);

}  // namespace cavcool
