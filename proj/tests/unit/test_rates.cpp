#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cavcool/error.hpp"
#include "cavcool/rates.hpp"

using namespace cavcool;

namespace {

// Weak-drive free-space sideband rates: a two-level system with coupling
// a = eta Omega cos(Theta_L) on sigma (b + b^dag) scatters with a Lorentzian
// of full width gamma centred on the sidebands Delta = +-nu.
double free_space_rate(const ModelParams& p, int sign) {
  const double a = p.eta * p.omega * std::cos(p.theta_l);
  const double d = p.delta - sign * 1.0;
  return a * a * p.gamma / (d * d + 0.25 * p.gamma * p.gamma);
}

double mean_of(const RVector& p) {
  double m = 0.0;
  for (Eigen::Index n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p(n);
  return m;
}

}  // namespace

TEST_CASE("rate result bookkeeping") {
  const auto r = make_rate_result(0.001, 0.004, RateMethod::perturbative);
  CHECK(r.w == doctest::Approx(0.003));
  CHECK(r.n_st == doctest::Approx(1.0 / 3.0));
  CHECK(r.cooling());
  const auto h = make_rate_result(0.004, 0.001, RateMethod::perturbative);
  CHECK(h.w < 0.0);
  CHECK(std::isnan(h.n_st));
  const auto z = make_rate_result(0.0, 0.0, RateMethod::perturbative);
  CHECK(z.w == 0.0);
  CHECK_FALSE(std::signbit(z.w));
  CHECK(to_string(RateMethod::trajectory_fit) == "trajectory-fit");
}

TEST_CASE("reduced steady state of a driven two-level system") {
  ModelParams p;
  p.g = 0.0;
  p.gamma = 0.2;
  p.omega = 0.03;
  for (double delta : {-2.0, -1.0, -0.3, 0.0, 0.7}) {
    p.delta = delta;
    const CMatrix rho = steady_state_reduced(build_liouvillian(p, LiouvillianKind::reduced_l0));
    const double expect = p.omega * p.omega / (delta * delta + 0.25 * p.gamma * p.gamma + 2.0 * p.omega * p.omega);
    // Internal index v * 2 + c: |e,0> is 2.
    CHECK(rho(2, 2).real() == doctest::Approx(expect).epsilon(1e-10));
    CHECK(rho.trace().real() == doctest::Approx(1.0));
    CHECK((rho - rho.adjoint()).norm() < 1e-14);
  }
}

TEST_CASE("cavity-enhanced linewidth in the steady state") {
  ModelParams p;
  p.omega = 0.005;
  p.delta = -1.0;
  p.delta_c = -18.0;
  const CMatrix rho = steady_state_reduced(build_liouvillian(p, LiouvillianKind::reduced_l0));
  const double gc = p.g * std::cos(p.phi);
  const double dd = p.delta - p.delta_c;
  const double gamma_eff = p.gamma + gc * gc * p.kappa / (dd * dd + 0.25 * p.kappa * p.kappa);
  const double expect =
      p.omega * p.omega / (p.delta * p.delta + 0.25 * gamma_eff * gamma_eff + 2.0 * p.omega * p.omega);
  CHECK(rho(2, 2).real() == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("degenerate steady state is rejected") {
  ModelParams p;
  p.kappa = 0.0;
  p.gamma = 0.0;
  CHECK_THROWS_AS(steady_state_reduced(build_liouvillian(p, LiouvillianKind::reduced_l0)), NumericalError);
}

TEST_CASE("free-space limit reproduces the sideband Lorentzians") {
  ModelParams p;
  p.g = 0.0;
  p.gamma = 0.05;
  p.omega = 0.005;
  for (double delta : {-1.0, -1.02, -0.5, 0.5, 1.0, -2.0}) {
    p.delta = delta;
    const auto r = perturbative_rates(p);
    CHECK(r.a_plus == doctest::Approx(free_space_rate(p, +1)).epsilon(0.1));
    CHECK(r.a_minus == doctest::Approx(free_space_rate(p, -1)).epsilon(0.1));
  }
}

TEST_CASE("resolvent and correlation integral agree") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    ModelParams p;
    p.delta = -3.0 + 4.0 * u(rng);
    p.delta_c = -20.0 + 40.0 * u(rng);
    p.omega = 0.001 + 0.009 * u(rng);
    p.g = 0.1 + 0.9 * u(rng);
    p.kappa = 1.0 + 19.0 * u(rng);
    p.gamma = 0.01 + 0.49 * u(rng);
    const auto a = perturbative_rates(p);
    const auto b = correlation_integral_rates(p);
    CHECK(b.method == RateMethod::correlation_integral);
    CHECK(b.a_plus == doctest::Approx(a.a_plus).epsilon(0.01));
    CHECK(b.a_minus == doctest::Approx(a.a_minus).epsilon(0.01));
  }
}

TEST_CASE("structural zeros and scaling of the perturbative rates") {
  ModelParams p;
  p.delta_c = -18.0;
  p.eta = 0.0;
  const auto zero = perturbative_rates(p);
  CHECK(zero.a_plus == 0.0);
  CHECK(zero.a_minus == 0.0);
  CHECK(zero.w == 0.0);

  p.eta = 0.02;
  const auto base = perturbative_rates(p);
  p.eta = 0.05;
  const auto scaled = perturbative_rates(p);
  CHECK(scaled.a_minus == doctest::Approx(base.a_minus * 6.25).epsilon(1e-10));
  CHECK(scaled.n_st == doctest::Approx(base.n_st).epsilon(1e-10));

  // Quadratic in Omega at weak drive.
  p.eta = 0.02;
  p.omega = 1e-4;
  const double w1 = perturbative_rates(p).w;
  p.omega = 2e-4;
  const double w2 = perturbative_rates(p).w;
  CHECK(w2 / w1 == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("red detuning cools, blue detuning heats") {
  ModelParams p;
  p.delta_c = -18.0;
  p.delta = -1.0;
  CHECK(perturbative_rates(p).w > 0.0);
  p.delta = 1.0;
  CHECK(perturbative_rates(p).w < 0.0);
}

TEST_CASE("rate matrix and rate equation") {
  const Eigen::MatrixXd r = rate_matrix(0.001, 0.004, 6);
  CHECK(r.colwise().sum().cwiseAbs().maxCoeff() < 1e-18);
  CHECK(r(0, 1) == doctest::Approx(0.004));      // 1 -> 0 at 1 * A-
  CHECK(r(2, 1) == doctest::Approx(2 * 0.001));  // 1 -> 2 at 2 * A+

  // Pure cooling ends in the ground state.
  RVector p0 = RVector::Zero(5);
  p0(3) = 1.0;
  const auto cool = rate_equation_evolve(0.0, 0.01, p0, 3000.0);
  CHECK(cool.populations.back()(0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(cool.size() == 201);

  // Detailed balance and the stationary mean at n_trap = 12.
  RVector q0 = RVector::Zero(12);
  q0(0) = 1.0;
  const auto traj = rate_equation_evolve(0.001, 0.004, q0, 2e4);
  const RVector& ps = traj.populations.back();
  for (int n = 0; n + 1 < 12; ++n) CHECK(std::abs(ps(n + 1) / ps(n) - 0.25) < 1e-8);
  CHECK(std::abs(mean_of(ps) - 1.0 / 3.0) < 1e-4);
}

TEST_CASE("fit recovers rate-equation rates") {
  const RVector p0 = thermal_distribution(1.0, 20);
  const auto traj = rate_equation_evolve(0.001, 0.004, p0, 5.0 / 0.003, 400);
  const auto r = fit_rates(traj);
  CHECK(r.method == RateMethod::trajectory_fit);
  CHECK(r.a_plus == doctest::Approx(0.001).epsilon(0.01));
  CHECK(r.a_minus == doctest::Approx(0.004).epsilon(0.01));
  CHECK(r.n_st == doctest::Approx(1.0 / 3.0).epsilon(0.01));

  const auto pop = fit_rates_populations(traj);
  CHECK(pop.method == RateMethod::rate_ode);
  CHECK(pop.a_plus == doctest::Approx(0.001).epsilon(0.01));
  CHECK(pop.a_minus == doctest::Approx(0.004).epsilon(0.01));

  FitOptions fixed;
  fixed.fixed_asymptote = 1.0 / 3.0;
  const auto f = fit_mean_decay(traj, fixed);
  CHECK(f.rates.w == doctest::Approx(0.003).epsilon(0.01));
}

TEST_CASE("fit guards") {
  const RVector p0 = thermal_distribution(1.0, 20);
  // Too short: only ~10% of the decay.
  const auto short_traj = rate_equation_evolve(0.001, 0.004, p0, 0.035 / 0.003, 100);
  CHECK_THROWS_AS(fit_rates(short_traj), NumericalError);

  // Flat trajectory.
  const auto flat = rate_equation_evolve(0.0, 0.0, p0, 100.0, 50);
  const auto r = fit_rates(flat);
  CHECK(r.w == 0.0);
  CHECK(r.a_plus == 0.0);

  // Heating is reported with negative W, not as an error.
  const auto heat = rate_equation_evolve(0.004, 0.001, p0, 100.0, 100);
  CHECK(fit_mean_decay(heat).rates.w < 0.0);
}

TEST_CASE("numerical route agrees with perturbation theory at weak drive") {
  ModelParams p;
  p.omega = 0.005;
  p.delta = -1.0;
  p.delta_c = -18.0;
  const auto c = compare_methods(p);
  CHECK(std::abs(c.dev_a_plus) < 0.1);
  CHECK(std::abs(c.dev_a_minus) < 0.1);
  CHECK(c.agreement);
  CHECK(c.numeric.method == RateMethod::trajectory_fit);
}

TEST_CASE("numerical route: structural zeros and heating") {
  ModelParams p;
  p.delta = -1.0;
  p.delta_c = -18.0;
  p.eta = 0.0;
  const auto zero = numeric_rates(p);
  CHECK(zero.rates.w == 0.0);
  CHECK(zero.rates.a_plus == 0.0);

  // Omega = 0: the molecule stays dark and nothing moves.
  p.eta = 0.02;
  p.omega = 0.0;
  CHECK(numeric_rates(p).rates.w == 0.0);
  const CMatrix dark = steady_state_reduced(build_liouvillian(p, LiouvillianKind::reduced_l0));
  CHECK(dark(0, 0).real() == doctest::Approx(1.0));

  p.omega = 0.05;
  p.delta = 1.0;
  const auto heat = numeric_rates(p);
  CHECK(heat.rates.w < 0.0);
  CHECK(std::isnan(heat.rates.n_st));
}
