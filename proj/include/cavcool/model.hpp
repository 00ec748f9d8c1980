#pragma once

#include <string>
#include <vector>

#include "cavcool/quantum_core.hpp"

namespace cavcool {

/// Dimensionless parameters of one simulation point. All frequencies and
/// rates are in units of the trap frequency nu (hbar = nu = 1); only
/// `nu_si` carries SI units (rad/s) and is used for output conversion.
struct ModelParams {
  double delta = -1.0;     // laser - molecule detuning
  double delta_c = -10.0;  // laser - cavity detuning
  double omega = 0.05;     // laser Rabi frequency
  double g = 0.41;         // vacuum Rabi frequency
  double kappa = 14.29;    // cavity linewidth
  double gamma = 1.93e-4;  // vibrational linewidth
  double eta = 0.02;       // Lamb-Dicke parameter
  double phi = 0.78539816339744831;
  double theta_l = 0.78539816339744831;
  double theta_c = 0.78539816339744831;
  double nu_si = 2.199114857512855e6;  // 2 pi x 350 kHz
  HilbertLayout layout{};

  /// Throws std::invalid_argument on negative rates or non-finite values.
  void validate() const;

  /// Non-empty when the point sits outside the comfortable Lamb-Dicke regime.
  std::string lamb_dicke_warning() const;

  /// Largest rate relevant for the RK4 step-size guard.
  double rate_scale() const;
};

/// Parameter set of the COS contour maps (Omega = 0.05 nu).
ModelParams cos_reference_params();

enum class LambDickeOrder { zeroth, first };

/// Full Hamiltonian on the layout space:
///   H = -Delta|e><e| + (b^dag b + 1/2) - delta_c a^dag a
///       + [(Omega + g a^dag cos phi) sigma + h.c.]
///       + [eta (i Omega cos Theta_L - g a^dag cos Theta_C sin phi) sigma + h.c.](b + b^dag)
/// The last bracket is dropped for LambDickeOrder::zeroth.
CMatrix build_hamiltonian(const ModelParams& p, LambDickeOrder order = LambDickeOrder::first);

/// H_M + H_C + V_I^(0) on the internal (vibration x photon) space.
CMatrix internal_hamiltonian(const ModelParams& p);

/// Internal part F of the first-order coupling V_I^(1) = F (b + b^dag),
/// on the internal space. Hermitian; proportional to eta.
CMatrix first_order_coupling(const ModelParams& p);

struct JumpOperator {
  std::string name;
  CMatrix op;
  double rate = 0.0;
};

/// Cavity decay (a, kappa) and spontaneous emission (sigma, gamma) on the
/// layout space. Zero-rate channels are omitted. The recoil kernel is
/// replaced by rho itself, so spontaneous emission leaves n unchanged.
std::vector<JumpOperator> build_dissipators(const ModelParams& p);

/// Same channels on the internal space.
std::vector<JumpOperator> build_internal_dissipators(const ModelParams& p);

/// Direct evaluation of -i[H, rho] + sum_k D[J_k] rho.
CMatrix lindblad_rhs(const CMatrix& h, const std::vector<JumpOperator>& jumps, const CMatrix& rho);

enum class LiouvillianKind { full, reduced_l0 };

/// Superoperator with d vec(rho)/dt = matrix * vec(rho).
struct LiouvillianMatrix {
  CMatrix matrix;
  LiouvillianKind kind = LiouvillianKind::full;
  int hilbert_dim = 0;
  HilbertLayout layout{};  // meaningful for kind == full
  double rate_scale = 1.0;
};

/// kind == full: H with V_I^(1), both dissipators, dimension d^2.
/// kind == reduced_l0: internal space, H_M + H_C + V_I^(0), 16 x 16.
LiouvillianMatrix build_liouvillian(const ModelParams& p, LiouvillianKind kind = LiouvillianKind::full);

LiouvillianMatrix liouvillian_from(const CMatrix& h, const std::vector<JumpOperator>& jumps);

}  // namespace cavcool
