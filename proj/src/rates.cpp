#include "cavcool/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "cavcool/error.hpp"
#include "cavcool/io.hpp"

namespace cavcool {

namespace {

constexpr double kNu = 1.0;  // trap frequency in its own units
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double positive_zero(double x) { return x + 0.0; }  // maps -0.0 to +0.0

}  // namespace

std::string_view to_string(RateMethod m) {
  switch (m) {
    case RateMethod::perturbative: return "perturbative";
    case RateMethod::trajectory_fit: return "trajectory-fit";
    case RateMethod::rate_ode: return "rate-ode";
    case RateMethod::correlation_integral: return "correlation-integral";
  }
  return "unknown";
}

RateResult make_rate_result(double a_plus, double a_minus, RateMethod method) {
  RateResult r;
  r.a_plus = positive_zero(a_plus);
  r.a_minus = positive_zero(a_minus);
  r.w = positive_zero(a_minus - a_plus);
  r.n_st = r.w > 0.0 ? r.a_plus / r.w : kNaN;
  r.method = method;
  return r;
}

// ---------------------------------------------------------------------------
// Steady state and resolvent

CMatrix steady_state_reduced(const LiouvillianMatrix& l0) {
  if (l0.kind != LiouvillianKind::reduced_l0) {
    throw std::invalid_argument("steady_state_reduced: expects the reduced L0 superoperator");
  }
  const Eigen::Index n = l0.matrix.rows();
  const int d = l0.hilbert_dim;

  Eigen::JacobiSVD<CMatrix> svd(l0.matrix);
  const RVector& sv = svd.singularValues();
  const double cutoff = 1e-9 * sv(0);
  const auto null_dim = (sv.array() <= cutoff).count();
  if (null_dim > 1) {
    throw NumericalError("steady_state_reduced: degenerate null space (dimension " + std::to_string(null_dim) + ")");
  }

  CMatrix a = l0.matrix;
  a.row(n - 1) = trace_functional(d).transpose();
  CVector rhs = CVector::Zero(n);
  rhs(n - 1) = 1.0;
  const CVector x = a.fullPivLu().solve(rhs);

  const double residual = (l0.matrix * x).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-9)) {
    throw NumericalError("steady_state_reduced: residual " + format_number(residual) + " exceeds 1e-9");
  }
  CMatrix rho = devectorize(x);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return rho / rho.trace();
}

RateResult perturbative_rates(const ModelParams& p) {
  const LiouvillianMatrix l0 = build_liouvillian(p, LiouvillianKind::reduced_l0);
  const CMatrix rho_s = steady_state_reduced(l0);
  const CMatrix f = first_order_coupling(p);
  const CVector source = vectorize(f * rho_s);
  const Eigen::Index n = l0.matrix.rows();

  auto rate = [&](double sign) {
    const CMatrix shifted = l0.matrix - sign * kI * kNu * CMatrix::Identity(n, n);
    Eigen::FullPivLU<CMatrix> lu(shifted);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
      throw NumericalError("perturbative_rates: shifted Liouvillian is singular (undamped mode at +-nu)");
    }
    const CVector x = lu.solve(source);
    if (!x.allFinite()) throw NumericalError("perturbative_rates: non-finite resolvent");
    return -2.0 * (f * devectorize(x)).trace().real();
  };

  return make_rate_result(rate(+1.0), rate(-1.0), RateMethod::perturbative);
}

RateResult correlation_integral_rates(const ModelParams& p, const CorrelationOptions& options) {
  const LiouvillianMatrix l0 = build_liouvillian(p, LiouvillianKind::reduced_l0);
  const CMatrix rho_s = steady_state_reduced(l0);
  const CMatrix f = first_order_coupling(p);
  const CMatrix f_rho = f * rho_s;

  // The stationary part Tr{F rho_S}^2 only adds an imaginary constant to the
  // regularized integral, so integrate the decaying remainder.
  const CVector z0 = vectorize(f_rho - f_rho.trace() * rho_s);
  const CVector tr_f = vectorize(f.transpose());
  const double z0_norm = z0.norm();
  if (z0_norm == 0.0) return make_rate_result(0.0, 0.0, RateMethod::correlation_integral);

  const Eigen::Index n = l0.matrix.rows();
  const double fastest = p.kappa + p.gamma + std::abs(p.delta) + std::abs(p.delta_c) + 2.0 * (p.g + p.omega) + kNu;
  const double h = options.step_fraction / fastest;

  auto integral = [&](double sign) {
    // y = (z, q): z' = (L0 - sign i nu) z, q' = Tr{F z}
    LiouvillianMatrix aug;
    aug.matrix = CMatrix::Zero(n + 1, n + 1);
    aug.matrix.topLeftCorner(n, n) = l0.matrix - sign * kI * kNu * CMatrix::Identity(n, n);
    aug.matrix.block(n, 0, 1, n) = tr_f.transpose();
    Rk4Propagator prop(aug, h);

    CVector y = CVector::Zero(n + 1);
    y.head(n) = z0;
    double t = 0.0;
    for (int s = 0;; ++s) {
      y = (prop.power_of_two(s) * y).eval();
      t += std::ldexp(h, s);
      if (!y.allFinite()) throw NumericalError("correlation_integral_rates: non-finite correlation");
      if (y.head(n).norm() <= options.tolerance * z0_norm) break;
      if (t > options.max_time) throw NumericalError("correlation_integral_rates: correlation did not decay");
    }
    return 2.0 * y(n).real();
  };

  return make_rate_result(integral(+1.0), integral(-1.0), RateMethod::correlation_integral);
}

// ---------------------------------------------------------------------------
// Rate equation

Eigen::MatrixXd rate_matrix(double a_plus, double a_minus, int n_trap) {
  if (n_trap < 1) throw std::invalid_argument("rate_matrix: n_trap must be >= 1");
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n_trap, n_trap);
  for (int n = 0; n < n_trap; ++n) {
    const double up = n + 1 < n_trap ? (n + 1) * a_plus : 0.0;
    const double down = n * a_minus;
    r(n, n) = -(up + down);
    if (n + 1 < n_trap) r(n + 1, n) = up;
    if (n > 0) r(n - 1, n) = down;
  }
  return r;
}

namespace {

// RK4 propagator of the rate equation over one interval of length `span`.
Eigen::MatrixXd rate_interval_propagator(const Eigen::MatrixXd& r, double span) {
  const Eigen::Index n = r.rows();
  const double fastest = std::max(r.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  const auto substeps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span * fastest / 0.05)));
  const double h = span / static_cast<double>(substeps);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd hr = h * r;
  Eigen::MatrixXd step = id + hr / 4.0;
  step = id + hr * step / 3.0;
  step = id + hr * step / 2.0;
  step = id + hr * step;

  Eigen::MatrixXd out = id;
  Eigen::MatrixXd base = step;
  for (std::int64_t k = substeps; k > 0; k >>= 1) {
    if (k & 1) out = base * out;
    if (k > 1) base = base * base;
  }
  return out;
}

}  // namespace

Trajectory rate_equation_evolve(double a_plus, double a_minus, const RVector& p0, double t_end, int samples) {
  if (!(a_plus >= 0.0) || !(a_minus >= 0.0)) throw std::invalid_argument("rate_equation_evolve: rates must be >= 0");
  if (p0.size() < 1) throw std::invalid_argument("rate_equation_evolve: empty distribution");
  if (std::abs(p0.sum() - 1.0) > 1e-10 || p0.minCoeff() < -1e-12) {
    throw std::invalid_argument("rate_equation_evolve: p0 is not a probability vector");
  }
  if (!(t_end >= 0.0) || samples < 1) throw std::invalid_argument("rate_equation_evolve: bad horizon");

  const int n_trap = static_cast<int>(p0.size());
  const Eigen::MatrixXd r = rate_matrix(a_plus, a_minus, n_trap);
  const double span = t_end / samples;
  const Eigen::MatrixXd step = rate_interval_propagator(r, span);

  Trajectory traj;
  traj.n_trap = n_trap;
  RVector p = p0;
  traj.push_populations(0.0, p);
  for (int i = 1; i <= samples; ++i) {
    p = step * p;
    traj.push_populations(span * i, p);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Fitting

namespace {

struct Window {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<std::size_t> index;  // position in the trajectory
};

Window fit_window(const Trajectory& traj, double transient) {
  Window w;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] + 1e-12 >= transient) {
      w.t.push_back(traj.times[i]);
      w.y.push_back(traj.mean_n[i]);
      w.index.push_back(i);
    }
  }
  if (w.t.size() < 4) throw NumericalError("fit_rates: fewer than 4 samples after the transient window");
  return w;
}

struct LinearFit {
  double offset = 0.0;     // asymptote
  double amplitude = 0.0;  // value - asymptote at the window start
  double rss = 0.0;
};

// For a fixed dimensionless decay u = W * span, the model is linear in
// (offset, amplitude), or in the amplitude alone for a fixed offset.
LinearFit linear_fit(const Window& w, double u, double fixed_offset) {
  const Eigen::Index m = static_cast<Eigen::Index>(w.t.size());
  if (!std::isnan(fixed_offset)) {
    const double t0 = w.t.front();
    const double span = w.t.back() - t0;
    Eigen::VectorXd e(m), y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      e(i) = std::exp(-u * (w.t[static_cast<std::size_t>(i)] - t0) / span);
      y(i) = w.y[static_cast<std::size_t>(i)] - fixed_offset;
    }
    LinearFit f;
    f.offset = fixed_offset;
    f.amplitude = e.dot(y) / e.squaredNorm();
    f.rss = (f.amplitude * e - y).squaredNorm();
    return f;
  }
  const double t0 = w.t.front();
  const double span = w.t.back() - t0;
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::exp(-u * (w.t[static_cast<std::size_t>(i)] - t0) / span);
    y(i) = w.y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(y);
  LinearFit f;
  f.offset = c(0);
  f.amplitude = c(1);
  f.rss = (a * c - y).squaredNorm();
  return f;
}

}  // namespace

namespace {

bool is_flat(const Window& w, double tolerance) {
  const auto [lo, hi] = std::minmax_element(w.y.begin(), w.y.end());
  const double scale = std::max(1.0, std::max(std::abs(*lo), std::abs(*hi)));
  return *hi - *lo <= tolerance * scale;
}

}  // namespace

FitReport fit_mean_decay(const Trajectory& traj, const FitOptions& options) {
  const Window w = fit_window(traj, options.transient);

  FitReport report;
  if (is_flat(w, options.flat_tolerance)) {
    report.flat = true;
    report.rates = make_rate_result(0.0, 0.0, RateMethod::trajectory_fit);
    report.n0 = w.y.front();
    return report;
  }

  // Coarse scan over x = asinh(u), then Brent refinement inside the best
  // bracket. Negative u describes growth (heating).
  constexpr int kScan = 480;
  const double x_lo = -std::asinh(60.0);
  const double x_hi = std::asinh(600.0);
  auto objective = [&](double x) { return linear_fit(w, std::sinh(x), options.fixed_asymptote).rss; };

  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= kScan; ++k) {
    const double x = x_lo + (x_hi - x_lo) * k / kScan;
    const double v = objective(x);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  if (best == 0 || best == kScan) throw NumericalError("fit_rates: exponential fit did not converge");
  const double step = (x_hi - x_lo) / kScan;
  const double a = x_lo + (best - 1) * step;
  const double b = x_lo + (best + 1) * step;
  const auto [x_opt, rss] = boost::math::tools::brent_find_minima(objective, a, b, 52);

  const double u = std::sinh(x_opt);
  const double t0 = w.t.front();
  const double span = w.t.back() - t0;
  const double rate = u / span;
  const LinearFit lf = linear_fit(w, u, options.fixed_asymptote);
  if (!std::isfinite(rate) || !std::isfinite(lf.offset) || !std::isfinite(lf.amplitude)) {
    throw NumericalError("fit_rates: non-finite fit parameters");
  }

  // <n>(t) = n_inf + (n0 - n_inf) e^{-W t}; rate equation: n_inf = A+ / W.
  const double a_plus = lf.offset * rate;
  report.rates = make_rate_result(a_plus, a_plus + rate, RateMethod::trajectory_fit);
  report.rates.fit_residual = std::sqrt(rss / static_cast<double>(w.t.size()));
  report.n0 = lf.offset + lf.amplitude * std::exp(rate * t0);
  report.decay_fraction = rate > 0.0 ? -std::expm1(-rate * w.t.back()) : 0.0;
  return report;
}

RateResult fit_rates(const Trajectory& traj, const FitOptions& options) {
  const FitReport report = fit_mean_decay(traj, options);
  if (!report.flat && report.rates.w > 0.0 && report.decay_fraction < options.min_decay_fraction) {
    throw NumericalError("fit_rates: trajectory covers only " + format_number(100.0 * report.decay_fraction, 3) +
                         "% of the decay; extend the horizon");
  }
  return report.rates;
}

namespace {

struct PopulationResidual {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  PopulationResidual(const Trajectory& traj, std::vector<std::size_t> idx, double scale)
      : traj_(traj), idx_(std::move(idx)), scale_(scale) {}

  int inputs() const { return 2; }
  int values() const { return static_cast<int>(idx_.size() - 1) * traj_.n_trap; }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    const double a_plus = std::abs(x(0)) * scale_;
    const double a_minus = std::abs(x(1)) * scale_;
    const Eigen::MatrixXd r = rate_matrix(a_plus, a_minus, traj_.n_trap);
    const double span = traj_.times[idx_[1]] - traj_.times[idx_[0]];
    const Eigen::MatrixXd step = rate_interval_propagator(r, span);
    RVector p = traj_.populations[idx_[0]];
    for (std::size_t k = 1; k < idx_.size(); ++k) {
      p = step * p;
      fvec.segment(static_cast<Eigen::Index>(k - 1) * traj_.n_trap, traj_.n_trap) = p - traj_.populations[idx_[k]];
    }
    return 0;
  }

  const Trajectory& traj_;
  std::vector<std::size_t> idx_;
  double scale_;
};

}  // namespace

RateResult fit_rates_populations(const Trajectory& traj, const FitOptions& options) {
  const FitReport start = fit_mean_decay(traj, options);
  if (start.flat) {
    RateResult r = start.rates;
    r.method = RateMethod::rate_ode;
    return r;
  }
  const Window w = fit_window(traj, options.transient);
  const double scale = std::max(std::abs(start.rates.w), 1e-300);

  PopulationResidual functor(traj, w.index, scale);
  Eigen::NumericalDiff<PopulationResidual> numdiff(functor);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<PopulationResidual>> lm(numdiff);
  Eigen::VectorXd x(2);
  x << std::max(start.rates.a_plus, 0.0) / scale, std::max(start.rates.a_minus, 0.0) / scale;
  const auto status = lm.minimize(x);
  if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters) {
    throw NumericalError("fit_rates_populations: improper input");
  }
  Eigen::VectorXd fvec(functor.values());
  functor(x, fvec);
  RateResult r = make_rate_result(std::abs(x(0)) * scale, std::abs(x(1)) * scale, RateMethod::rate_ode);
  r.fit_residual = std::sqrt(fvec.squaredNorm() / static_cast<double>(fvec.size()));
  return r;
}

// ---------------------------------------------------------------------------
// Numerical route

namespace {

// Trap populations of lim_{t->inf} M^k rho0, doubling from 2^s_start steps
// until two successive doublings agree.
RVector stationary_populations(Rk4Propagator& propagator, const CVector& v0, const HilbertLayout& layout,
                               int s_start) {
  constexpr double kTol = 1e-12;
  constexpr int kMaxDoublings = 62;
  auto populations = [&](int s) {
    const CMatrix r = devectorize(propagator.power_of_two(s) * v0);
    return partial_trace_trap(CMatrix(0.5 * (r + r.adjoint())), layout);
  };
  RVector prev = populations(s_start);
  for (int s = s_start + 1; s <= kMaxDoublings; ++s) {
    RVector cur = populations(s);
    if (!cur.allFinite()) throw NumericalError("numeric_rates: non-finite stationary state");
    if ((cur - prev).cwiseAbs().maxCoeff() <= kTol) return cur;
    prev = std::move(cur);
  }
  throw NumericalError("numeric_rates: no stationary limit within 2^62 steps");
}

}  // namespace

NumericRun numeric_rates(const ModelParams& p, const NumericOptions& options) {
  p.validate();
  if (options.samples < 4) throw std::invalid_argument("numeric_rates: need at least 4 samples");
  const LiouvillianMatrix l = build_liouvillian(p, LiouvillianKind::full);
  const DensityMatrix rho0 = make_initial_state(p.layout, options.initial);
  const CVector v0 = vectorize(rho0.matrix());
  const double dt = options.dt > 0.0 ? options.dt : default_time_step(p);
  Rk4Propagator propagator(l, dt);

  FitOptions fit_opts;
  fit_opts.transient = p.kappa > 0.0 ? options.transient_per_kappa / p.kappa : 0.0;

  // Without first-order coupling no term connects different trap levels, so
  // the populations are exactly conserved; the step matrix then has a
  // degenerate unit eigenspace in which repeated squaring only accumulates
  // rounding. Record a short trajectory and report the exact zeros.
  if (first_order_coupling(p).cwiseAbs().maxCoeff() == 0.0) {
    PropagationOptions po;
    po.stepping = options.stepping;
    const double t_end = options.min_horizon;
    const auto steps = static_cast<std::int64_t>(std::llround(t_end / dt));
    NumericRun run;
    run.trajectory = propagate(rho0, l, propagator, t_end, std::max<std::int64_t>(1, steps / options.samples), po);
    run.t_end = run.trajectory.times.back();
    run.attempts = 1;
    run.stationary = run.trajectory.populations.front();
    run.rates = make_rate_result(0.0, 0.0, RateMethod::trajectory_fit);
    return run;
  }

  double guess = 0.0;
  try {
    guess = perturbative_rates(p).w;
  } catch (const NumericalError&) {
    guess = 0.0;
  }
  auto horizon_for = [&](double rate) {
    const double t = rate != 0.0 ? options.horizon_factor / std::abs(rate) : options.max_horizon;
    return std::clamp(t, options.min_horizon, options.max_horizon);
  };
  double target = horizon_for(guess);
  const double max_remaining = std::exp(-0.6 * options.horizon_factor);
  const double min_remaining = std::exp(-3.0 * options.horizon_factor);

  PropagationOptions prop_opts;
  prop_opts.stepping = options.stepping;

  NumericRun run;
  FitReport fit;
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    // Record interval is a power of two of steps so that the cached
    // squarings of the step matrix are reused across attempts.
    const double steps_per_sample = std::max(1.0, target / (dt * options.samples));
    const int s = static_cast<int>(std::ceil(std::log2(steps_per_sample)));
    const std::int64_t record_every = std::int64_t{1} << std::max(0, s);
    const double t_end = static_cast<double>(record_every) * dt * options.samples;

    run.trajectory = propagate(rho0, l, propagator, t_end, record_every, prop_opts);
    run.t_end = run.trajectory.times.back();
    run.attempts = attempt;
    // Nothing moves (e.g. eta = 0 or no drive): the stationary search would
    // only chase rounding in the degenerate unit eigenvalues.
    if (is_flat(fit_window(run.trajectory, fit_opts.transient), fit_opts.flat_tolerance)) {
      fit = fit_mean_decay(run.trajectory, fit_opts);
      break;
    }
    const int s_end = static_cast<int>(std::ceil(std::log2(static_cast<double>(record_every) * options.samples)));
    run.stationary = stationary_populations(propagator, v0, p.layout, s_end);

    double n_inf = 0.0;
    for (Eigen::Index n = 0; n < run.stationary.size(); ++n) n_inf += static_cast<double>(n) * run.stationary(n);
    // Only the late part of the window is fitted: W is the asymptotic rate,
    // and internal transients (overshoot of <n> while the dressed states
    // settle) can otherwise dominate when the initial gap is small.
    FitOptions tail = fit_opts;
    tail.fixed_asymptote = n_inf;
    tail.transient = std::max(fit_opts.transient, options.tail_fraction * run.t_end);
    fit = fit_mean_decay(run.trajectory, tail);
    if (fit.flat) break;

    const auto& y = run.trajectory.mean_n;
    const auto first = static_cast<std::size_t>(
        std::lower_bound(run.trajectory.times.begin(), run.trajectory.times.end(), fit_opts.transient - 1e-12) -
        run.trajectory.times.begin());
    const double initial_gap = std::abs(y[first] - n_inf);
    run.remaining = initial_gap > 0.0 ? std::abs(y.back() - n_inf) / initial_gap : 0.0;
    run.relaxation_rate = fit.rates.w;

    const bool too_short = run.remaining > max_remaining && run.t_end < options.max_horizon;
    const bool too_long = run.remaining < min_remaining && run.t_end > options.min_horizon;
    if ((!too_short && !too_long) || attempt == options.max_attempts) break;
    const double by_fit = fit.rates.w > 0.0 ? horizon_for(fit.rates.w) : options.max_horizon;
    target = too_short ? std::max(2.0 * run.t_end, by_fit) : std::min(0.5 * run.t_end, by_fit);
    target = std::clamp(target, options.min_horizon, options.max_horizon);
  }

  if (fit.flat) {
    run.rates = fit.rates;
    return run;
  }
  if (!(run.relaxation_rate > 0.0)) throw NumericalError("numeric_rates: <n>(t) does not relax to its limit");
  if (1.0 - run.remaining < fit_opts.min_decay_fraction)
    throw NumericalError("numeric_rates: horizon too short to resolve the decay");

  // Detailed balance of the rate equation: p_{n+1} / p_n = A+ / A-.
  const double p0 = run.stationary(0), p1 = run.stationary(1);
  if (!(p0 > 0.0)) throw NumericalError("numeric_rates: empty ground trap level in the stationary state");
  const double ratio = std::max(p1, 0.0) / p0;
  const double gamma = run.relaxation_rate;
  if (ratio == 1.0) throw NumericalError("numeric_rates: stationary state without net cooling or heating");
  const double a_minus = gamma / std::abs(1.0 - ratio);
  run.rates = make_rate_result(ratio * a_minus, a_minus, RateMethod::trajectory_fit);
  run.rates.fit_residual = fit.rates.fit_residual;
  return run;
}

MethodComparison compare_methods(const ModelParams& p, const NumericOptions& options) {
  MethodComparison c;
  c.perturbative = perturbative_rates(p);
  c.numeric = numeric_rates(p, options).rates;
  auto dev = [](double num, double ref) { return ref != 0.0 ? (num - ref) / std::abs(ref) : (num == 0.0 ? 0.0 : kNaN); };
  c.dev_a_plus = dev(c.numeric.a_plus, c.perturbative.a_plus);
  c.dev_a_minus = dev(c.numeric.a_minus, c.perturbative.a_minus);
  c.dev_w = dev(c.numeric.w, c.perturbative.w);
  c.dev_n_st = dev(c.numeric.n_st, c.perturbative.n_st);
  c.agreement = p.omega <= 0.01 && std::abs(c.dev_a_plus) < 0.1 && std::abs(c.dev_a_minus) < 0.1;
  return c;
}

}  // namespace cavcool
