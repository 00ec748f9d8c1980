#pragma once

#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "cavcool/types.hpp"

namespace cavcool {

/// Truncated composite space |v> (x) |photon> (x) |n>.
///
/// Ordering is fixed: vibration is the slowest index, the trap ladder the
/// fastest. Vibration and photon spaces are always two-dimensional
/// (|g>,|e>) and (|0_c>,|1_c>).
struct HilbertLayout {
  static constexpr int n_vib = 2;
  static constexpr int n_photon = 2;
  int n_trap = 5;

  /// Dimension of the internal (vibration x photon) factor.
  static constexpr int internal_dim() { return n_vib * n_photon; }

  int dim() const { return internal_dim() * n_trap; }
  int index(int v, int c, int n) const { return (v * n_photon + c) * n_trap + n; }

  /// Throws std::invalid_argument unless n_trap >= 2.
  void validate() const;

  friend bool operator==(const HilbertLayout&, const HilbertLayout&) = default;
};

/// Ladder, Pauli and identity operators embedded in a given layout.
struct ElementaryOperators {
  HilbertLayout layout;
  CMatrix a, a_dag;          // cavity photon
  CMatrix b, b_dag;          // trap phonon
  CMatrix sigma, sigma_dag;  // sigma = |g><e|
  CMatrix identity;
};

ElementaryOperators build_elementary(const HilbertLayout& layout);

/// Operators on the internal (vibration x photon) space only, dimension 4.
struct InternalOperators {
  CMatrix a, a_dag;
  CMatrix sigma, sigma_dag;
  CMatrix identity;
};

InternalOperators build_internal();

/// Truncated annihilation operator on an n-level ladder.
CMatrix ladder_annihilation(int levels);

/// Unit-trace Hermitian PSD matrix tied to a layout. The constructor checks
/// the invariants and throws std::invalid_argument on violation.
class DensityMatrix {
 public:
  static constexpr double kHermiticityTol = 1e-10;
  static constexpr double kTraceTol = 1e-8;
  static constexpr double kEigenvalueTol = -1e-8;

  DensityMatrix(CMatrix rho, HilbertLayout layout);

  const CMatrix& matrix() const { return rho_; }
  const HilbertLayout& layout() const { return layout_; }

 private:
  CMatrix rho_;
  HilbertLayout layout_;
};

struct DensityDiagnostics {
  double hermiticity = 0.0;  // max |rho - rho^dag|
  double trace_error = 0.0;  // |Tr rho - 1|
  double min_eigenvalue = 0.0;
};

DensityDiagnostics diagnose(const CMatrix& rho);

/// p_n = Tr{|n><n| rho}, tracing out vibration and photon.
RVector partial_trace_trap(const DensityMatrix& rho);
RVector partial_trace_trap(const CMatrix& rho, const HilbertLayout& layout);

/// Reduced internal (vibration x photon) density matrix, tracing out the trap.
CMatrix partial_trace_internal(const CMatrix& rho, const HilbertLayout& layout);

/// Projector onto the trap Fock state |n>, embedded in the full space.
CMatrix trap_projector(const HilbertLayout& layout, int n);

// -- vectorization (column stacking) -------------------------------------

template <typename Derived>
CVector vectorize(const Eigen::MatrixBase<Derived>& m) {
  return m.reshaped();
}

/// Inverse of vectorize. Throws std::invalid_argument if the length is not a
/// perfect square.
CMatrix devectorize(const CVector& v);

// -- superoperators acting on column-stacked vectors ---------------------
// vec(A X B) = (B^T (x) A) vec(X)

template <typename Derived>
CMatrix left_multiplication(const Eigen::MatrixBase<Derived>& a) {
  const auto n = a.rows();
  return Eigen::kroneckerProduct(CMatrix::Identity(n, n), a.eval());
}

template <typename Derived>
CMatrix right_multiplication(const Eigen::MatrixBase<Derived>& b) {
  const auto n = b.rows();
  return Eigen::kroneckerProduct(b.transpose().eval(), CMatrix::Identity(n, n));
}

/// Matrix of X -> H X - X H.
template <typename Derived>
CMatrix commutator_superoperator(const Eigen::MatrixBase<Derived>& h) {
  return left_multiplication(h) - right_multiplication(h);
}

/// Matrix of X -> (rate/2)(2 J X J^dag - {J^dag J, X}).
template <typename Derived>
CMatrix lindblad_superoperator(const Eigen::MatrixBase<Derived>& jump, double rate) {
  const CMatrix j = jump;
  const CMatrix jdj = j.adjoint() * j;
  const auto n = j.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix sandwich = Eigen::kroneckerProduct(j.conjugate().eval(), j);
  CMatrix anti = Eigen::kroneckerProduct(id, jdj) + Eigen::kroneckerProduct(jdj.transpose().eval(), id);
  return 0.5 * rate * (2.0 * sandwich - anti);
}

/// Row vector t with t . vec(X) = Tr X.
CVector trace_functional(int dim);

}  // namespace cavcool
