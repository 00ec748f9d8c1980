#include "cavcool/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cavcool {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("ModelParams: ") + what);
}

// Coefficients of the laser and cavity terms, shared by the full and the
// internal-space constructions.
struct Couplings {
  Complex laser0, cavity0;  // (laser0 + cavity0 a^dag) sigma
  Complex laser1, cavity1;  // (laser1 + cavity1 a^dag) sigma, times (b + b^dag)
};

Couplings couplings(const ModelParams& p) {
  Couplings c;
  c.laser0 = p.omega;
  c.cavity0 = p.g * std::cos(p.phi);
  c.laser1 = p.eta * kI * p.omega * std::cos(p.theta_l);
  c.cavity1 = -p.eta * p.g * std::cos(p.theta_c) * std::sin(p.phi);
  return c;
}

}  // namespace

void ModelParams::validate() const {
  const double all[] = {delta, delta_c, omega, g, kappa, gamma, eta, phi, theta_l, theta_c, nu_si};
  for (double x : all) require(std::isfinite(x), "non-finite parameter");
  require(kappa >= 0.0, "kappa must be >= 0");
  require(gamma >= 0.0, "gamma must be >= 0");
  require(omega >= 0.0, "omega must be >= 0");
  require(g >= 0.0, "g must be >= 0");
  require(eta >= 0.0, "eta must be >= 0");
  require(eta < 1.0, "eta must be < 1 for the first-order Lamb-Dicke expansion");
  require(nu_si > 0.0, "nu_si must be > 0");
  layout.validate();
}

std::string ModelParams::lamb_dicke_warning() const {
  if (eta > 0.3) return "eta = " + std::to_string(eta) + " is large for a first-order Lamb-Dicke expansion";
  return {};
}

double ModelParams::rate_scale() const { return std::max({kappa, 1.0, g, omega}); }

ModelParams cos_reference_params() { return ModelParams{}; }

CMatrix build_hamiltonian(const ModelParams& p, LambDickeOrder order) {
  p.validate();
  const auto ops = build_elementary(p.layout);
  const auto c = couplings(p);
  const CMatrix excited = ops.sigma_dag * ops.sigma;

  CMatrix h = -p.delta * excited;
  h += ops.b_dag * ops.b + 0.5 * ops.identity;
  h += -p.delta_c * ops.a_dag * ops.a;

  const CMatrix v0 = (c.laser0 * ops.identity + c.cavity0 * ops.a_dag) * ops.sigma;
  h += v0 + v0.adjoint();

  if (order == LambDickeOrder::first) {
    // a^dag, sigma and (b + b^dag) act on different factors and commute.
    const CMatrix f_half = (c.laser1 * ops.identity + c.cavity1 * ops.a_dag) * ops.sigma;
    const CMatrix x = ops.b + ops.b_dag;
    h += (f_half + f_half.adjoint()) * x;
  }
  return h;
}

CMatrix internal_hamiltonian(const ModelParams& p) {
  p.validate();
  const auto ops = build_internal();
  const auto c = couplings(p);
  CMatrix h = -p.delta * ops.sigma_dag * ops.sigma - p.delta_c * ops.a_dag * ops.a;
  const CMatrix v0 = (c.laser0 * ops.identity + c.cavity0 * ops.a_dag) * ops.sigma;
  h += v0 + v0.adjoint();
  return h;
}

CMatrix first_order_coupling(const ModelParams& p) {
  p.validate();
  const auto ops = build_internal();
  const auto c = couplings(p);
  const CMatrix f_half = (c.laser1 * ops.identity + c.cavity1 * ops.a_dag) * ops.sigma;
  return f_half + f_half.adjoint();
}

namespace {

std::vector<JumpOperator> make_jumps(const ModelParams& p, const CMatrix& a, const CMatrix& sigma) {
  std::vector<JumpOperator> jumps;
  if (p.kappa > 0.0) jumps.push_back({"cavity", a, p.kappa});
  if (p.gamma > 0.0) jumps.push_back({"spontaneous", sigma, p.gamma});
  return jumps;
}

}  // namespace

std::vector<JumpOperator> build_dissipators(const ModelParams& p) {
  p.validate();
  const auto ops = build_elementary(p.layout);
  return make_jumps(p, ops.a, ops.sigma);
}

std::vector<JumpOperator> build_internal_dissipators(const ModelParams& p) {
  p.validate();
  const auto ops = build_internal();
  return make_jumps(p, ops.a, ops.sigma);
}

CMatrix lindblad_rhs(const CMatrix& h, const std::vector<JumpOperator>& jumps, const CMatrix& rho) {
  CMatrix out = -kI * (h * rho - rho * h);
  for (const auto& j : jumps) {
    const CMatrix jdj = j.op.adjoint() * j.op;
    out += 0.5 * j.rate * (2.0 * j.op * rho * j.op.adjoint() - jdj * rho - rho * jdj);
  }
  return out;
}

LiouvillianMatrix liouvillian_from(const CMatrix& h, const std::vector<JumpOperator>& jumps) {
  LiouvillianMatrix l;
  l.hilbert_dim = static_cast<int>(h.rows());
  l.matrix = -kI * commutator_superoperator(h);
  for (const auto& j : jumps) l.matrix += lindblad_superoperator(j.op, j.rate);
  return l;
}

LiouvillianMatrix build_liouvillian(const ModelParams& p, LiouvillianKind kind) {
  p.validate();
  LiouvillianMatrix l;
  if (kind == LiouvillianKind::full) {
    l = liouvillian_from(build_hamiltonian(p, LambDickeOrder::first), build_dissipators(p));
    l.layout = p.layout;
  } else {
    l = liouvillian_from(internal_hamiltonian(p), build_internal_dissipators(p));
  }
  l.kind = kind;
  l.rate_scale = p.rate_scale();
  return l;
}

}  // namespace cavcool
