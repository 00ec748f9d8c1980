#include "cavcool/molecules.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "cavcool/error.hpp"
#include "cavcool/io.hpp"

#ifndef CAVCOOL_DATA_DIR
#define CAVCOOL_DATA_DIR "data"
#endif

namespace cavcool {

namespace {

double angular_frequency(double wavenumber_cm1) { return 2.0 * si::pi * si::c * wavenumber_cm1 * 100.0; }

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be positive");
}

}  // namespace

void MoleculeSpec::validate() const {
  if (!(wavenumber > 0.0)) throw std::invalid_argument(name + ": wavenumber must be > 0");
  if (!(dipole >= 0.0)) throw std::invalid_argument(name + ": dipole must be >= 0");
  if (!(mass > 0.0)) throw std::invalid_argument(name + ": mass must be > 0");
  if (!(gamma_si >= 0.0)) throw std::invalid_argument(name + ": gamma must be >= 0");
}

double einstein_a(double wavenumber_cm1, double dipole_au) {
  require_positive(wavenumber_cm1, "wavenumber");
  if (dipole_au < 0.0) throw std::invalid_argument("dipole must be >= 0");
  const double w = angular_frequency(wavenumber_cm1);
  const double mu = dipole_au * si::atomic_dipole;
  return w * w * w * mu * mu / (3.0 * si::pi * si::epsilon0 * si::hbar * si::c * si::c * si::c);
}

double lamb_dicke(double wavenumber_cm1, double mass_amu, double nu_si) {
  require_positive(wavenumber_cm1, "wavenumber");
  require_positive(mass_amu, "mass");
  require_positive(nu_si, "trap frequency");
  const double k = 2.0 * si::pi * wavenumber_cm1 * 100.0;
  return std::sqrt(si::hbar * k * k / (2.0 * mass_amu * si::amu * nu_si));
}

double vacuum_rabi(double dipole_au, double field_amplitude) {
  if (dipole_au < 0.0 || field_amplitude < 0.0) throw std::invalid_argument("vacuum_rabi: negative input");
  return dipole_au * si::atomic_dipole * field_amplitude / (2.0 * si::hbar);
}

double cooperativity(double g, double kappa, double gamma) {
  require_positive(kappa, "kappa");
  require_positive(gamma, "gamma");
  return g * g / (kappa * gamma);
}

ModelParams to_model_params(const MoleculeSpec& molecule, const TrapSpec& trap, const CavitySpec& cavity,
                            const DriveSpec& drive, const GeometrySpec& geometry) {
  molecule.validate();
  require_positive(trap.nu_si, "trap frequency");
  require_positive(cavity.field_amplitude, "cavity field amplitude");
  require_positive(cavity.kappa_si, "cavity linewidth");

  const double nu = trap.nu_si;
  const double gamma_si = molecule.gamma_si > 0.0 ? molecule.gamma_si : einstein_a(molecule.wavenumber, molecule.dipole);

  ModelParams p;
  p.delta = drive.delta;
  p.delta_c = drive.delta_c;
  p.omega = drive.omega;
  p.g = vacuum_rabi(molecule.dipole, cavity.field_amplitude) / nu;
  p.kappa = cavity.kappa_si / nu;
  p.gamma = gamma_si / nu;
  p.eta = lamb_dicke(molecule.wavenumber, molecule.mass, nu);
  p.phi = geometry.phi;
  p.theta_l = geometry.theta_l;
  p.theta_c = geometry.theta_c;
  p.nu_si = nu;
  p.validate();
  return p;
}

std::vector<MoleculeSpec> parse_molecule_table(std::string_view text) {
  std::vector<MoleculeSpec> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 7)
      throw ConfigError("molecule table: expected 7 fields, found " + std::to_string(tok.size()), lineno);

    auto number = [&](const std::string& s, const char* what) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
        throw ConfigError(std::string("molecule table: bad ") + what + " '" + s + "'", lineno);
      return v;
    };
    MoleculeSpec m;
    m.name = tok[0];
    m.point_group = tok[1];
    m.irrep = tok[2];
    m.wavenumber = number(tok[3], "wavenumber");
    m.dipole = number(tok[4], "dipole");
    m.gamma_si = number(tok[5], "gamma");
    m.mass = number(tok[6], "mass");
    try {
      m.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("molecule table: ") + e.what(), lineno);
    }
    for (const auto& r : rows)
      if (r.name == m.name) throw ConfigError("molecule table: duplicate name " + m.name, lineno);
    rows.push_back(std::move(m));
  }
  return rows;
}

std::vector<MoleculeSpec> load_molecule_table(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  try {
    return parse_molecule_table(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::filesystem::path default_molecule_table_path() {
  if (const char* dir = std::getenv("CAVCOOL_DATA_DIR"); dir && *dir) return std::filesystem::path(dir) / "molecules.dat";
  return std::filesystem::path(CAVCOOL_DATA_DIR) / "molecules.dat";
}

const MoleculeSpec& find_molecule(const std::vector<MoleculeSpec>& table, std::string_view name) {
  for (const auto& m : table)
    if (m.name == name) return m;
  throw ConfigError("unknown molecule '" + std::string(name) + "'");
}

}  // namespace cavcool
