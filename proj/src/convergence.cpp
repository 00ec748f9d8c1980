#include "cavcool/convergence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cavcool {

ConvergenceReport convergence_scan(const ModelParams& p, const std::vector<int>& n_traps,
                                   const NumericOptions& options, double tolerance) {
  if (n_traps.empty()) throw std::invalid_argument("convergence_scan: empty truncation list");
  for (int n : n_traps)
    if (n < 3) throw std::invalid_argument("convergence_scan: n_trap must be >= 3");

  ConvergenceReport report;
  report.tolerance = tolerance;
  for (int n : n_traps) {
    ModelParams q = p;
    q.layout.n_trap = n;
    ConvergenceRow row;
    row.n_trap = n;
    row.rates = numeric_rates(q, options).rates;
    row.rel_change = std::numeric_limits<double>::quiet_NaN();
    if (!report.rows.empty()) {
      const double prev = report.rows.back().rates.w;
      const double diff = std::abs(row.rates.w - prev);
      row.rel_change = prev != 0.0 ? diff / std::abs(prev) : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      if (report.converged_at == 0 && row.rel_change < tolerance) report.converged_at = n;
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace cavcool
