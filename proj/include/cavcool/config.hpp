#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cavcool/molecules.hpp"
#include "cavcool/sweep.hpp"

namespace cavcool {

enum class Mode { simulate, rates, sweep, omega_scan, molecule, convergence };
enum class MethodSelector { numeric, perturbative, both };

std::string_view to_string(Mode m);
std::string_view to_string(MethodSelector m);
/// Throws ConfigError on unknown names.
Mode parse_mode(std::string_view s);
MethodSelector parse_method(std::string_view s);

/// The molecule / trap / cavity / drive / geometry layer, resolved through
/// to_model_params.
struct PhysicalSpec {
  std::string molecule;
  std::filesystem::path table;
  TrapSpec trap;
  CavitySpec cavity;
  DriveSpec drive;
  GeometrySpec geometry;
};

struct NumericsConfig {
  double dt = 0.0;        // 0: automatic
  double t_end = 0.0;     // simulate only; required there
  int n_trap = 5;
  long record_every = 0;  // simulate only; 0 picks ~200 samples
  int samples = 200;
  InitialState initial{};
  double horizon_factor = 5.0;
  int max_attempts = 5;
};

struct OutputConfig {
  std::filesystem::path dir = ".";
  bool svg = false;
};

struct RunConfig {
  Mode mode = Mode::rates;
  MethodSelector method = MethodSelector::both;
  ModelParams params;                    // fully resolved, nu units
  std::optional<PhysicalSpec> physical;  // set when the physical block was used
  std::filesystem::path molecule_table;  // molecule mode
  NumericsConfig numerics;
  GridSpec grid{};
  int workers = 1;
  std::vector<double> omegas{0.05, 0.1, 0.2, 0.3, 0.5};
  std::vector<int> convergence_n_traps{4, 5, 6, 7};
  double convergence_tolerance = 0.02;
  OutputConfig output;

  NumericOptions numeric_options() const;
  SweepOptions sweep_options(CellMethod m) const;
};

/// Line-oriented `key = value` text with `[section]` headers; '#' starts a
/// comment. Relative file paths resolve against `base_dir`. Throws
/// ConfigError (with a line number where one applies) on syntax errors,
/// unknown keys, range violations and conflicting blocks.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");

RunConfig load_config(const std::filesystem::path& path);

/// Config text that parses back to `config` exactly (all numbers round-trip),
/// using the direct nu-unit block.
std::string render_config(const RunConfig& config);

}  // namespace cavcool
