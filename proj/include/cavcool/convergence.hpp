#pragma once

#include <vector>

#include "cavcool/rates.hpp"

namespace cavcool {

struct ConvergenceRow {
  int n_trap = 0;
  RateResult rates;
  double rel_change = 0.0;  // |W - W_prev| / |W_prev|; NaN on the first row
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double tolerance = 0.02;
  int converged_at = 0;  // first n_trap whose W is within tolerance of the previous one; 0 if none

  bool converged() const { return converged_at > 0; }
};

/// Extracts the rates numerically for each trap truncation in `n_traps`
/// (each >= 3). Successive W are compared relative to the earlier one; two
/// exactly vanishing rates count as converged.
ConvergenceReport convergence_scan(const ModelParams& p, const std::vector<int>& n_traps,
                                   const NumericOptions& options = {}, double tolerance = 0.02);

}  // namespace cavcool
