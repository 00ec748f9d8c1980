#include "cavcool/quantum_core.hpp"

#include <cmath>
#include <string>

namespace cavcool {

namespace {

CMatrix embed(const CMatrix& vib, const CMatrix& photon, const CMatrix& trap) {
  return Eigen::kroneckerProduct(Eigen::kroneckerProduct(vib, photon).eval(), trap);
}

CMatrix sigma_2level() {
  // sigma = |g><e| with |g> = index 0, |e> = index 1
  CMatrix s = CMatrix::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

}  // namespace

void HilbertLayout::validate() const {
  if (n_trap < 2) {
    throw std::invalid_argument("HilbertLayout: n_trap must be >= 2, got " + std::to_string(n_trap));
  }
}

CMatrix ladder_annihilation(int levels) {
  CMatrix b = CMatrix::Zero(levels, levels);
  for (int n = 1; n < levels; ++n) b(n - 1, n) = std::sqrt(static_cast<double>(n));
  return b;
}

ElementaryOperators build_elementary(const HilbertLayout& layout) {
  layout.validate();
  const CMatrix id_v = CMatrix::Identity(HilbertLayout::n_vib, HilbertLayout::n_vib);
  const CMatrix id_c = CMatrix::Identity(HilbertLayout::n_photon, HilbertLayout::n_photon);
  const CMatrix id_t = CMatrix::Identity(layout.n_trap, layout.n_trap);

  ElementaryOperators ops;
  ops.layout = layout;
  ops.a = embed(id_v, ladder_annihilation(HilbertLayout::n_photon), id_t);
  ops.b = embed(id_v, id_c, ladder_annihilation(layout.n_trap));
  ops.sigma = embed(sigma_2level(), id_c, id_t);
  ops.a_dag = ops.a.adjoint();
  ops.b_dag = ops.b.adjoint();
  ops.sigma_dag = ops.sigma.adjoint();
  ops.identity = CMatrix::Identity(layout.dim(), layout.dim());
  return ops;
}

InternalOperators build_internal() {
  const CMatrix id_v = CMatrix::Identity(2, 2);
  const CMatrix id_c = CMatrix::Identity(2, 2);
  InternalOperators ops;
  ops.a = Eigen::kroneckerProduct(id_v, ladder_annihilation(2));
  ops.sigma = Eigen::kroneckerProduct(sigma_2level(), id_c);
  ops.a_dag = ops.a.adjoint();
  ops.sigma_dag = ops.sigma.adjoint();
  ops.identity = CMatrix::Identity(4, 4);
  return ops;
}

DensityDiagnostics diagnose(const CMatrix& rho) {
  DensityDiagnostics d;
  d.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(rho.trace() - Complex(1.0));
  const CMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

DensityMatrix::DensityMatrix(CMatrix rho, HilbertLayout layout) : rho_(std::move(rho)), layout_(layout) {
  layout_.validate();
  if (rho_.rows() != layout_.dim() || rho_.cols() != layout_.dim()) {
    throw std::invalid_argument("DensityMatrix: matrix is " + std::to_string(rho_.rows()) + "x" +
                                std::to_string(rho_.cols()) + ", layout needs " +
                                std::to_string(layout_.dim()));
  }
  const auto d = diagnose(rho_);
  if (!(d.hermiticity <= kHermiticityTol)) throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (!(d.trace_error <= kTraceTol)) throw std::invalid_argument("DensityMatrix: trace is not 1");
  if (!(d.min_eigenvalue >= kEigenvalueTol)) throw std::invalid_argument("DensityMatrix: not positive semidefinite");
}

RVector partial_trace_trap(const CMatrix& rho, const HilbertLayout& layout) {
  if (rho.rows() != layout.dim() || rho.cols() != layout.dim()) {
    throw std::invalid_argument("partial_trace_trap: dimension mismatch with layout");
  }
  RVector p = RVector::Zero(layout.n_trap);
  for (int v = 0; v < HilbertLayout::n_vib; ++v)
    for (int c = 0; c < HilbertLayout::n_photon; ++c)
      for (int n = 0; n < layout.n_trap; ++n) {
        const int k = layout.index(v, c, n);
        p(n) += rho(k, k).real();
      }
  return p;
}

RVector partial_trace_trap(const DensityMatrix& rho) { return partial_trace_trap(rho.matrix(), rho.layout()); }

CMatrix partial_trace_internal(const CMatrix& rho, const HilbertLayout& layout) {
  if (rho.rows() != layout.dim() || rho.cols() != layout.dim()) {
    throw std::invalid_argument("partial_trace_internal: dimension mismatch with layout");
  }
  constexpr int m = HilbertLayout::internal_dim();
  CMatrix out = CMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int n = 0; n < layout.n_trap; ++n) out(i, j) += rho(i * layout.n_trap + n, j * layout.n_trap + n);
  return out;
}

CMatrix trap_projector(const HilbertLayout& layout, int n) {
  CMatrix p = CMatrix::Zero(layout.dim(), layout.dim());
  for (int i = 0; i < HilbertLayout::internal_dim(); ++i) p(i * layout.n_trap + n, i * layout.n_trap + n) = 1.0;
  return p;
}

CMatrix devectorize(const CVector& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) {
    throw std::invalid_argument("devectorize: length " + std::to_string(v.size()) + " is not a perfect square");
  }
  return v.reshaped(n, n);
}

CVector trace_functional(int dim) {
  return vectorize(CMatrix::Identity(dim, dim));
}

}  // namespace cavcool
