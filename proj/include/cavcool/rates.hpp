#pragma once

#include <limits>
#include <string_view>

#include "cavcool/dynamics.hpp"

namespace cavcool {

enum class RateMethod { perturbative, trajectory_fit, rate_ode, correlation_integral };

std::string_view to_string(RateMethod m);

/// Heating/cooling rates in units of nu. W = A- - A+ > 0 means cooling;
/// n_st is NaN unless W > 0.
struct RateResult {
  double a_plus = 0.0;
  double a_minus = 0.0;
  double w = 0.0;
  double n_st = 0.0;
  RateMethod method = RateMethod::perturbative;
  double fit_residual = 0.0;  // RMS residual, fit methods only

  bool cooling() const { return w > 0.0; }
};

/// Fills w and n_st from the two rates.
RateResult make_rate_result(double a_plus, double a_minus, RateMethod method);

// -- perturbative (resolvent) route ---------------------------------------

/// Steady state of the internal Liouvillian L0 (4 x 4 density matrix).
/// Solves L0 x = 0 with the last row replaced by the trace constraint.
/// Throws NumericalError when the null space is degenerate or the residual
/// of the unmodified system exceeds 1e-9.
CMatrix steady_state_reduced(const LiouvillianMatrix& l0);

/// A+- = -2 Re Tr{ F (L0 -+ i nu)^-1 [F rho_S] } with F the internal part of
/// the first-order coupling. Throws NumericalError if a shifted system is
/// singular.
RateResult perturbative_rates(const ModelParams& p);

struct CorrelationOptions {
  double step_fraction = 0.02;  // RK4 step = fraction / fastest frequency
  double tolerance = 1e-12;     // stop when |z(t)| < tolerance |z(0)|
  double max_time = 1e9;
};

/// Same rates from the time domain: 2 Re int_0^inf e^{-+ i nu t} <F(t) F(0)> dt,
/// with the correlation propagated under L0 (quantum regression) by RK4.
RateResult correlation_integral_rates(const ModelParams& p, const CorrelationOptions& options = {});

// -- rate equation ---------------------------------------------------------

/// Birth-death generator with reflecting truncation at n_trap - 1; columns
/// sum to zero.
Eigen::MatrixXd rate_matrix(double a_plus, double a_minus, int n_trap);

/// Integrates dp_n/dt = -(n A- + (n+1) A+) p_n + (n+1) A- p_{n+1} + n A+ p_{n-1}
/// with RK4 and returns `samples` + 1 uniformly spaced samples on [0, t_end].
Trajectory rate_equation_evolve(double a_plus, double a_minus, const RVector& p0, double t_end, int samples = 200);

// -- fitting ---------------------------------------------------------------

struct FitOptions {
  double transient = 0.0;           // samples with t < transient are ignored
  double min_decay_fraction = 0.5;  // guard: 1 - exp(-W t_end) must reach this
  double flat_tolerance = 1e-12;    // relative spread below which <n>(t) is flat
  double fixed_asymptote = std::numeric_limits<double>::quiet_NaN();  // NaN: fitted
};

struct FitReport {
  RateResult rates;
  double n0 = 0.0;              // fitted <n>(0)
  double decay_fraction = 0.0;  // 1 - exp(-W t_last), 0 when W <= 0
  bool flat = false;
};

/// Least squares of <n>(t) = n_st + (n0 - n_st) exp(-W t) with no length
/// guard; with `fixed_asymptote` set, n_st is held at that value and only
/// (W, n0) are fitted. Throws NumericalError when the fit does not converge.
FitReport fit_mean_decay(const Trajectory& traj, const FitOptions& options = {});

/// fit_mean_decay plus the decay-fraction guard (NumericalError when a
/// cooling trajectory covers less than `min_decay_fraction` of its decay).
/// A flat trajectory gives A+ = A- = W = 0.
RateResult fit_rates(const Trajectory& traj, const FitOptions& options = {});

/// Diagnostic fit of the full population history p_n(t) to the rate
/// equation, starting from the mean-decay estimate. Tagged rate_ode.
RateResult fit_rates_populations(const Trajectory& traj, const FitOptions& options = {});

// -- numerical master-equation route ---------------------------------------

struct NumericOptions {
  double dt = 0.0;  // 0 selects default_time_step
  InitialState initial{};
  int samples = 200;
  double horizon_factor = 5.0;  // aim for t_end ~ horizon_factor / W
  double min_horizon = 50.0;
  double max_horizon = 1e14;
  int max_attempts = 5;
  double transient_per_kappa = 10.0;  // exclude t < 10 / kappa from the fit
  double tail_fraction = 0.25;        // and t < tail_fraction * t_end
  Stepping stepping = Stepping::automatic;
};

struct NumericRun {
  RateResult rates;
  Trajectory trajectory;
  double t_end = 0.0;
  int attempts = 0;
  RVector stationary;            // trap populations in the long-time limit
  double relaxation_rate = 0.0;  // fitted decay rate of <n>(t) towards its limit
  double remaining = 0.0;        // |<n>(t_end) - <n>_inf| / |<n>(t_0) - <n>_inf|
};

/// Rates from a propagated master equation:
///  - the trajectory is propagated to t -> infinity (repeated squaring of the
///    step matrix) to obtain the stationary trap populations; detailed balance
///    of the rate equation gives A+/A- = p_1/p_0;
///  - the late part of <n>(t) (t >= tail_fraction t_end) is fitted by an
///    exponential relaxation towards the stationary <n>, whose rate is |W|
///    (the sign follows from A+/A- < 1 or > 1);
///  - the horizon is adapted until the recorded trajectory covers between
///    ~0.6 and ~3 horizon_factor e-folds of the relaxation.
/// The first horizon guess comes from the perturbative rates. A trajectory
/// with no dynamics gives A+ = A- = 0.
NumericRun numeric_rates(const ModelParams& p, const NumericOptions& options = {});

struct MethodComparison {
  RateResult perturbative;
  RateResult numeric;
  double dev_a_plus = 0.0;  // (numeric - perturbative) / |perturbative|
  double dev_a_minus = 0.0;
  double dev_w = 0.0;
  double dev_n_st = 0.0;
  bool agreement = false;  // Omega <= 0.01 and |dev A+-| < 10%
};

MethodComparison compare_methods(const ModelParams& p, const NumericOptions& options = {});

}  // namespace cavcool
