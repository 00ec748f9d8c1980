#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cavcool/model.hpp"

namespace cavcool {

/// Sampled observables of a propagated (or rate-equation) run. Times are in
/// units of 1/nu.
struct Trajectory {
  int n_trap = 0;
  std::vector<double> times;
  std::vector<RVector> populations;  // p_n per sample
  std::vector<double> mean_n;
  std::vector<double> pop_excited;  // Tr{|e><e| rho}
  std::vector<double> pop_photon;   // Tr{a^dag a rho}
  std::vector<double> trace_drift;  // |Tr rho - 1|
  std::vector<double> hermiticity;  // max |rho - rho^dag| before re-symmetrization
  std::vector<double> min_eigenvalue;
  CMatrix final_state;  // empty for rate-equation trajectories

  std::size_t size() const { return times.size(); }

  /// Appends a sample built from populations only (internal columns are 0).
  void push_populations(double t, const RVector& p);
};

/// Column layout: t, p_0..p_{n_trap-1}, mean_n, pop_e, pop_photon, trace_drift.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Truncated thermal distribution p_n ~ (m/(m+1))^n, renormalized over
/// `levels` entries.
RVector thermal_distribution(double mean_n, int levels);

struct InitialState {
  enum class Kind { thermal, fock };
  Kind kind = Kind::thermal;
  double mean_n = 1.0;
  int fock_n = 0;
};

/// |g, 0_c><g, 0_c| (x) trap state.
DensityMatrix make_initial_state(const HilbertLayout& layout, const InitialState& recipe = {});

/// Largest step accepted by `propagate`: 0.1 / max(kappa, nu, g, Omega).
double max_time_step(const LiouvillianMatrix& l);

/// 0.005 / max(kappa, nu, g, Omega).
double default_time_step(const ModelParams& p);

/// One classic RK4 step of a linear autonomous system is multiplication by
/// P(h L) = 1 + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24. This class builds that
/// matrix once and caches its powers M^(2^s), so k steps cost O(log k)
/// matrix products instead of O(k) matrix-vector products.
///
/// For a trace-preserving generator (t^T L = 0 with t = vec(1)) the exact
/// step matrix satisfies t^T M = t^T. Repeated squaring doubles any rounding
/// error in that identity, so it is restored after every product.
class Rk4Propagator {
 public:
  Rk4Propagator(const LiouvillianMatrix& l, double dt);

  double dt() const { return dt_; }
  const CMatrix& step_matrix() const { return powers_.front(); }

  /// M^(2^s).
  const CMatrix& power_of_two(int s);

  /// M^k for k >= 0.
  CMatrix power(std::int64_t k);

 private:
  void restore_trace_row(CMatrix& m) const;

  double dt_;
  int hilbert_dim_ = 0;  // 0 when the generator is not a Liouvillian
  std::vector<CMatrix> powers_;
};

enum class Stepping {
  automatic,  // compiled for long runs, stepwise otherwise
  stepwise,   // explicit RK4 loop, re-symmetrized every step
  compiled,   // Rk4Propagator powers, re-symmetrized at every sample
};

struct PropagationOptions {
  Stepping stepping = Stepping::automatic;
  bool check_positivity = true;
  double trace_tolerance = 1e-8;
};

/// Fixed-step RK4 integration of d vec(rho)/dt = L vec(rho).
///
/// Samples are taken at t = j * record_every * dt for j = 0..floor(N /
/// record_every), N = round(t_end / dt). Throws std::invalid_argument when dt
/// violates the step-size guard and NumericalError when the trace drifts by
/// more than `trace_tolerance` or values become non-finite.
Trajectory propagate(const DensityMatrix& rho0, const LiouvillianMatrix& l, double dt, double t_end,
                     std::int64_t record_every, const PropagationOptions& options = {});

/// Same, reusing a prepared propagator (must have been built from `l`).
Trajectory propagate(const DensityMatrix& rho0, const LiouvillianMatrix& l, Rk4Propagator& propagator,
                     double t_end, std::int64_t record_every, const PropagationOptions& options = {});

}  // namespace cavcool
