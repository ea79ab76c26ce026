#include "spinforge/core/states.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "spinforge/core/overloaded.hpp"

namespace spinforge {

int basis_dim(const BasisDescriptor& basis) {
  return std::visit(overloaded{
                        [](const DickeBasis& b) { return b.spin.dim(); },
                        [](const ProductBasis& b) { return b.first.dim() * b.second.dim(); },
                        [](const CoupledBasis& b) { return b.dim(); },
                    },
                    basis);
}

std::string basis_name(const BasisDescriptor& basis) {
  return std::visit(overloaded{
                        [](const DickeBasis&) { return std::string("dicke"); },
                        [](const ProductBasis&) { return std::string("two_ensemble"); },
                        [](const CoupledBasis&) { return std::string("truncated"); },
                    },
                    basis);
}

SpMat operator_matrix(const BasisDescriptor& basis, CollectiveOp op, Ensemble which) {
  return std::visit(
      overloaded{
          [&](const DickeBasis& b) -> SpMat {
            if (which == Ensemble::Second) throw std::invalid_argument("single-ensemble basis has no second ensemble");
            return collective_matrix(b.spin, op);
          },
          [&](const ProductBasis& b) -> SpMat {
            const SpMat id1 = sparse_identity(b.first.dim());
            const SpMat id2 = sparse_identity(b.second.dim());
            if (which == Ensemble::First) return kron(collective_matrix(b.first, op), id2);
            if (which == Ensemble::Second) return kron(id1, collective_matrix(b.second, op));
            if (op == CollectiveOp::Casimir) {
              const SpMat sx = operator_matrix(basis, CollectiveOp::X);
              const SpMat sy = operator_matrix(basis, CollectiveOp::Y);
              const SpMat sz = operator_matrix(basis, CollectiveOp::Z);
              return SpMat(sx * sx + sy * sy + sz * sz);
            }
            return SpMat(kron(collective_matrix(b.first, op), id2) + kron(id1, collective_matrix(b.second, op)));
          },
          [&](const CoupledBasis& b) -> SpMat { return b.ensemble(op, which); },
      },
      basis);
}

DickeKet::DickeKet(SpinLength spin, CVector amps) : spin_(spin), amps_(std::move(amps)) {
  if (amps_.size() != spin_.dim()) throw std::invalid_argument("DickeKet: amplitude length must be 2S+1");
}

DickeKet DickeKet::basis_state(SpinLength spin, double m) {
  const double idx = m + spin.value();
  const int i = static_cast<int>(std::lround(idx));
  if (std::abs(idx - i) > 1e-9 || i < 0 || i >= spin.dim()) throw std::invalid_argument("DickeKet: m out of range");
  CVector a = CVector::Zero(spin.dim());
  a(i) = 1.0;
  return DickeKet(spin, std::move(a));
}

DickeKet DickeKet::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("cannot normalize a zero ket");
  return DickeKet(spin_, amps_ / n);
}

TwoEnsembleKet::TwoEnsembleKet(SpinLength first, SpinLength second, CMatrix amps)
    : first_(first), second_(second), amps_(std::move(amps)) {
  if (amps_.rows() != first_.dim() || amps_.cols() != second_.dim()) {
    throw std::invalid_argument("TwoEnsembleKet: amplitude matrix must be (2S1+1) x (2S2+1)");
  }
}

TwoEnsembleKet TwoEnsembleKet::product(const DickeKet& a, const DickeKet& b) {
  return TwoEnsembleKet(a.spin(), b.spin(), a.amps() * b.amps().transpose());
}

TwoEnsembleKet TwoEnsembleKet::from_flat(SpinLength first, SpinLength second, const CVector& flat) {
  if (flat.size() != first.dim() * second.dim()) throw std::invalid_argument("TwoEnsembleKet: flat length mismatch");
  CMatrix m(first.dim(), second.dim());
  for (int i = 0; i < first.dim(); ++i)
    for (int j = 0; j < second.dim(); ++j) m(i, j) = flat(i * second.dim() + j);
  return TwoEnsembleKet(first, second, std::move(m));
}

CVector TwoEnsembleKet::flat() const {
  CVector v(amps_.size());
  for (int i = 0; i < amps_.rows(); ++i)
    for (int j = 0; j < amps_.cols(); ++j) v(i * amps_.cols() + j) = amps_(i, j);
  return v;
}

TwoEnsembleKet TwoEnsembleKet::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("cannot normalize a zero ket");
  return TwoEnsembleKet(first_, second_, amps_ / n);
}

TruncatedManifoldKet::TruncatedManifoldKet(CoupledBasis basis, CVector amps)
    : basis_(std::move(basis)), amps_(std::move(amps)) {
  if (amps_.size() != basis_.dim()) throw std::invalid_argument("TruncatedManifoldKet: amplitude length mismatch");
}

std::vector<std::pair<SpinLength, CVector>> TruncatedManifoldKet::blocks() const {
  std::vector<std::pair<SpinLength, CVector>> out;
  for (int b = 0; b < basis_.n_blocks(); ++b) {
    const SpinLength s = basis_.block_spin(b);
    out.emplace_back(s, amps_.segment(basis_.offset(b), s.dim()));
  }
  return out;
}

std::vector<double> TruncatedManifoldKet::block_populations() const {
  std::vector<double> out;
  for (int b = 0; b < basis_.n_blocks(); ++b) {
    out.push_back(amps_.segment(basis_.offset(b), basis_.block_spin(b).dim()).squaredNorm());
  }
  return out;
}

double TruncatedManifoldKet::lowest_block_population() const { return block_populations().back(); }

TruncatedManifoldKet TruncatedManifoldKet::embedded(const CoupledBasis& larger) const {
  if (larger.twice_j1() != basis_.twice_j1() || larger.twice_j2() != basis_.twice_j2() ||
      larger.n_blocks() < basis_.n_blocks()) {
    throw std::invalid_argument("TruncatedManifoldKet::embedded: incompatible basis");
  }
  CVector a = CVector::Zero(larger.dim());
  a.head(amps_.size()) = amps_;
  return TruncatedManifoldKet(larger, std::move(a));
}

BasisDescriptor basis_of(const Ket& ket) {
  return std::visit(overloaded{
                        [](const DickeKet& k) -> BasisDescriptor { return DickeBasis{k.spin()}; },
                        [](const TwoEnsembleKet& k) -> BasisDescriptor { return ProductBasis{k.first(), k.second()}; },
                        [](const TruncatedManifoldKet& k) -> BasisDescriptor { return k.basis(); },
                    },
                    ket);
}

CVector flat_amplitudes(const Ket& ket) {
  return std::visit(overloaded{
                        [](const DickeKet& k) { return k.amps(); },
                        [](const TwoEnsembleKet& k) { return k.flat(); },
                        [](const TruncatedManifoldKet& k) { return k.amps(); },
                    },
                    ket);
}

Ket ket_from_flat(const BasisDescriptor& basis, const CVector& amps) {
  return std::visit(overloaded{
                        [&](const DickeBasis& b) -> Ket { return DickeKet(b.spin, amps); },
                        [&](const ProductBasis& b) -> Ket { return TwoEnsembleKet::from_flat(b.first, b.second, amps); },
                        [&](const CoupledBasis& b) -> Ket { return TruncatedManifoldKet(b, amps); },
                    },
                    basis);
}

DensityOperator::DensityOperator(BasisDescriptor basis, CMatrix matrix)
    : basis_(std::move(basis)), matrix_(std::move(matrix)) {
  const int d = basis_dim(basis_);
  if (matrix_.rows() != d || matrix_.cols() != d) throw std::invalid_argument("DensityOperator: dimension mismatch");
}

DensityOperator DensityOperator::pure(const Ket& ket) {
  const CVector a = flat_amplitudes(ket);
  return DensityOperator(basis_of(ket), a * a.adjoint());
}

double DensityOperator::hermiticity_error() const { return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff(); }

double DensityOperator::min_eigenvalue() const {
  const CMatrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace spinforge
