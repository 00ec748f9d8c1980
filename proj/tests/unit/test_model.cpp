#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cavcool/model.hpp"

using namespace cavcool;

TEST_CASE("reference parameter set") {
  const ModelParams p = cos_reference_params();
  CHECK(p.g == 0.41);
  CHECK(p.eta == 0.02);
  CHECK(p.kappa == doctest::Approx(14.29));
  CHECK(p.gamma == doctest::Approx(1.93e-4));
  CHECK(p.omega == 0.05);
  CHECK(p.phi == doctest::Approx(std::numbers::pi / 4));
  CHECK(p.nu_si == doctest::Approx(2 * std::numbers::pi * 350e3));
  CHECK(p.rate_scale() == doctest::Approx(14.29));
  CHECK(p.lamb_dicke_warning().empty());
}

TEST_CASE("parameter validation") {
  ModelParams p;
  p.kappa = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.gamma = std::nan("");
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.eta = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.eta = 0.4;
  CHECK_NOTHROW(p.validate());
  CHECK_FALSE(p.lamb_dicke_warning().empty());
}

TEST_CASE("Hamiltonian is Hermitian with the expected diagonal") {
  ModelParams p;
  p.delta = -0.7;
  p.delta_c = 3.0;
  const CMatrix h = build_hamiltonian(p);
  CHECK((h - h.adjoint()).norm() < 1e-15);
  const auto& l = p.layout;
  // -Delta |e><e| + (n + 1/2) - delta_c a^dag a
  CHECK(h(l.index(1, 1, 2), l.index(1, 1, 2)).real() == doctest::Approx(0.7 + 2.5 - 3.0));
  CHECK(h(l.index(0, 0, 0), l.index(0, 0, 0)).real() == doctest::Approx(0.5));
}

TEST_CASE("carrier and sideband matrix elements") {
  ModelParams p;
  const CMatrix h = build_hamiltonian(p);
  const auto& l = p.layout;
  const double c = std::cos(p.theta_l);
  // Carrier: <g,0,n| H |e,0,n> = Omega.
  CHECK(std::abs(h(l.index(0, 0, 2), l.index(1, 0, 2)) - Complex(p.omega, 0)) < 1e-15);
  // Cavity: <e,0,n| H |g,1,n> = g cos(phi).
  CHECK(std::abs(h(l.index(1, 0, 1), l.index(0, 1, 1)) - Complex(p.g * std::cos(p.phi), 0)) < 1e-15);
  for (int n = 1; n < l.n_trap; ++n) {
    // Laser red sideband: <g,0,n| H |e,0,n-1> = +i eta Omega cos(Theta_L) sqrt(n).
    const Complex expect(0.0, p.eta * p.omega * c * std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(h(l.index(0, 0, n), l.index(1, 0, n - 1)) - expect) < 1e-15);
    CHECK(std::abs(h(l.index(1, 0, n - 1), l.index(0, 0, n)) - std::conj(expect)) < 1e-15);
    // Cavity sideband: <g,1,n| H |e,0,n-1> = -eta g cos(Theta_C) sin(phi) sqrt(n).
    const double cav = -p.eta * p.g * std::cos(p.theta_c) * std::sin(p.phi) * std::sqrt(static_cast<double>(n));
    CHECK(std::abs(h(l.index(0, 1, n), l.index(1, 0, n - 1)) - Complex(cav, 0)) < 1e-15);
  }
}

TEST_CASE("zeroth order drops every motional coupling") {
  ModelParams p;
  const CMatrix h = build_hamiltonian(p, LambDickeOrder::zeroth);
  const auto& l = p.layout;
  for (int i = 0; i < l.dim(); ++i)
    for (int j = 0; j < l.dim(); ++j)
      if (i % l.n_trap != j % l.n_trap) CHECK(h(i, j) == Complex(0, 0));
  p.eta = 0.0;
  CHECK((build_hamiltonian(p, LambDickeOrder::first) - h).norm() == 0.0);
}

TEST_CASE("first-order coupling factorizes as F (b + b^dag)") {
  ModelParams p;
  p.delta = -1.3;
  const CMatrix diff = build_hamiltonian(p) - build_hamiltonian(p, LambDickeOrder::zeroth);
  const CMatrix f = first_order_coupling(p);
  const CMatrix x = ladder_annihilation(p.layout.n_trap) + ladder_annihilation(p.layout.n_trap).adjoint();
  const CMatrix expect = Eigen::kroneckerProduct(f, x).eval();
  CHECK((diff - expect).norm() < 1e-15);
  CHECK((f - f.adjoint()).norm() < 1e-15);
}

TEST_CASE("internal Hamiltonian is the trap-traced zeroth order") {
  ModelParams p;
  const CMatrix hi = internal_hamiltonian(p);
  const CMatrix h0 = build_hamiltonian(p, LambDickeOrder::zeroth);
  const int nt = p.layout.n_trap;
  const CMatrix trap = ladder_annihilation(nt).adjoint() * ladder_annihilation(nt) + 0.5 * CMatrix::Identity(nt, nt);
  const CMatrix rebuilt = Eigen::kroneckerProduct(hi, CMatrix::Identity(nt, nt)).eval() +
                          Eigen::kroneckerProduct(CMatrix::Identity(4, 4), trap).eval();
  CHECK((rebuilt - h0).norm() < 1e-14);
}

TEST_CASE("dissipators") {
  ModelParams p;
  auto jumps = build_dissipators(p);
  REQUIRE(jumps.size() == 2);
  CHECK(jumps[0].rate == p.kappa);
  CHECK(jumps[1].rate == p.gamma);
  p.gamma = 0.0;
  CHECK(build_dissipators(p).size() == 1);
  p.kappa = 0.0;
  CHECK(build_dissipators(p).empty());
}

TEST_CASE("Liouvillian matches the direct master-equation right-hand side") {
  ModelParams p;
  p.gamma = 0.3;  // make every term visible
  const auto l = build_liouvillian(p);
  CHECK(l.matrix.rows() == 400);
  CHECK(l.hilbert_dim == 20);

  std::mt19937 rng(3);
  std::normal_distribution<double> d;
  CMatrix a(20, 20);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) a(i, j) = Complex(d(rng), d(rng));
  CMatrix rho = a * a.adjoint();
  rho /= rho.trace();

  const CMatrix direct = lindblad_rhs(build_hamiltonian(p), build_dissipators(p), rho);
  const CMatrix via_l = devectorize(CVector(l.matrix * vectorize(rho)));
  CHECK((direct - via_l).norm() < 1e-12);

  // Trace preservation.
  CHECK((trace_functional(20).transpose() * l.matrix).norm() < 1e-12);

  const auto l0 = build_liouvillian(p, LiouvillianKind::reduced_l0);
  CHECK(l0.matrix.rows() == 16);
  CHECK(l0.kind == LiouvillianKind::reduced_l0);
}
