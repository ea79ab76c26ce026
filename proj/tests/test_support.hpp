#pragma once

#include <random>

#include <Eigen/Eigenvalues>

#include "spinforge/core/spin.hpp"
#include "spinforge/core/states.hpp"

namespace spinforge::testing {

inline CMatrix dense(const SpMat& m) { return CMatrix(m); }

/// exp(-i phi A) for Hermitian A by eigendecomposition; independent of the library's rotations.
inline CMatrix expm_hermitian(const CMatrix& a, double phi) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  const Eigen::VectorXd w = es.eigenvalues();
  CVector ph(w.size());
  for (int i = 0; i < w.size(); ++i) ph(i) = std::exp(cplx(0.0, -phi * w(i)));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

inline CVector random_ket(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cplx(n(rng), n(rng));
  return v.normalized();
}

/// Plain matrix of a collective operator, built from its textbook matrix elements.
inline CMatrix textbook_op(double S, char which) {
  const int d = static_cast<int>(std::lround(2 * S)) + 1;
  CMatrix sp = CMatrix::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    const double m = -S + i;
    sp(i + 1, i) = std::sqrt(S * (S + 1) - m * (m + 1));
  }
  CMatrix sz = CMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) sz(i, i) = -S + i;
  switch (which) {
    case '+': return sp;
    case '-': return sp.adjoint();
    case 'x': return 0.5 * (sp + sp.adjoint());
    case 'y': return cplx(0, -0.5) * (sp - sp.adjoint());
    default: return sz;
  }
}

}  // namespace spinforge::testing
