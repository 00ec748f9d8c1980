#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cavcool/rates.hpp"

namespace cavcool {

enum class CellMethod { perturbative, numeric };

std::string_view to_string(CellMethod m);

struct SweepCell {
  RateResult rates;
  bool ok = false;
  std::string error;  // set when !ok; the rate fields are NaN then
};

/// Row-major over (delta, delta_c): cell(i, j) has delta_axis[i], delta_c_axis[j].
struct SweepGrid {
  std::vector<double> delta_axis;
  std::vector<double> delta_c_axis;
  std::vector<SweepCell> cells;
  CellMethod method = CellMethod::perturbative;
  ModelParams base;

  std::size_t rows() const { return delta_axis.size(); }
  std::size_t cols() const { return delta_c_axis.size(); }
  const SweepCell& cell(std::size_t i, std::size_t j) const { return cells[i * cols() + j]; }
  std::size_t failures() const;
};

struct SweepOptions {
  CellMethod method = CellMethod::perturbative;
  int workers = 1;
  NumericOptions numeric{};
  double max_failure_fraction = 0.2;
};

/// `count` evenly spaced values from lo to hi inclusive (count >= 1; a single
/// value is lo).
std::vector<double> linspace(double lo, double hi, int count);

/// Rates of one (delta, delta_c) point of `base`.
RateResult evaluate_cell(const ModelParams& base, double delta, double delta_c, CellMethod method,
                         const NumericOptions& numeric = {});

/// Evaluates every cell independently, statically partitioned over
/// `workers` threads. Per-cell failures are recorded in the grid; throws
/// NumericalError when more than `max_failure_fraction` of the cells fail.
SweepGrid run_sweep(const ModelParams& base, const std::vector<double>& delta_axis,
                    const std::vector<double>& delta_c_axis, const SweepOptions& options = {});

struct GridIndex {
  std::size_t i = 0;
  std::size_t j = 0;
};

struct Extrema {
  GridIndex max_w;
  GridIndex min_n_st;
};

/// Largest W and smallest n_st among successful cooling cells. Ties are
/// broken by smallest |delta_c|, then smallest |delta + 1|, then lowest
/// linear index. Throws NumericalError when no cell cools.
Extrema find_extrema(const SweepGrid& grid);

/// Columns: delta_nu, delta_c_nu, a_plus_nu, a_minus_nu, w_nu, w_si_per_s,
/// n_st, method, status.
void write_sweep_csv(std::ostream& os, const SweepGrid& grid);

enum class SweepQuantity { w, n_st };

/// Heatmap of one quantity (delta on the x axis, delta_c on the y axis) with
/// a linear color scale. Failed and non-cooling n_st cells are drawn grey.
std::string sweep_svg(const SweepGrid& grid, SweepQuantity quantity);

// -- Omega scans -------------------------------------------------------------

struct GridSpec {
  double delta_min = -3.0, delta_max = 1.0;
  int delta_count = 21;
  double delta_c_min = -30.0, delta_c_max = 30.0;
  int delta_c_count = 21;
  /// Polish the grid extrema with a local search along delta (the sideband
  /// resonance is far narrower than any practical grid spacing).
  bool refine = true;
};

struct OmegaPoint {
  double omega = 0.0;
  double max_w = 0.0;  // units of nu
  double max_w_delta = 0.0, max_w_delta_c = 0.0;
  double min_n_st = 0.0;
  double min_n_st_delta = 0.0, min_n_st_delta_c = 0.0;
  std::size_t failed_cells = 0;
};

struct OmegaScan {
  std::vector<OmegaPoint> points;
  CellMethod method = CellMethod::perturbative;
  double nu_si = 0.0;
};

/// One sweep per Omega (strictly increasing, positive) and its extrema.
OmegaScan run_omega_scan(const ModelParams& base, const std::vector<double>& omega_axis, const GridSpec& grid,
                         const SweepOptions& options = {});

/// Columns: omega_nu, max_w_nu, max_w_si_per_s, max_w_delta_nu,
/// max_w_delta_c_nu, min_n_st, min_n_st_delta_nu, min_n_st_delta_c_nu, failed_cells.
void write_omega_scan_csv(std::ostream& os, const OmegaScan& scan);

}  // namespace cavcool
