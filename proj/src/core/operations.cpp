#include "spinforge/core/operations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spinforge/core/overloaded.hpp"
#include "spinforge/core/rotation.hpp"

namespace spinforge {

namespace {

CVector z_phases(SpinLength s, double phi) {
  CVector ph(s.dim());
  for (int i = 0; i < s.dim(); ++i) ph(i) = std::exp(-kI * (s.m_at(i) * phi));
  return ph;
}

bool couples_blocks(const OperatorProduct& product) {
  for (const auto& f : product) {
    if (f.which != Ensemble::Sum && f.op != CollectiveOp::Casimir) return true;
  }
  return false;
}

int coupling_factors(const OperatorProduct& product) {
  int n = 0;
  for (const auto& f : product) {
    if (f.which != Ensemble::Sum && f.op != CollectiveOp::Casimir) ++n;
  }
  return n;
}

}  // namespace

DickeKet coherent_state(SpinLength s, const Vec3& axis) {
  const double n = axis.norm();
  if (std::abs(n - 1.0) > 1e-9) throw std::invalid_argument("coherent_state: axis must be a unit vector");
  const double theta = std::acos(std::clamp(axis.z() / n, -1.0, 1.0));
  const double phi = std::atan2(axis.y(), axis.x());
  const Eigen::VectorXd col = stretched_column(s, theta);
  CVector amps = col.cast<cplx>().cwiseProduct(z_phases(s, phi));
  return DickeKet(s, std::move(amps));
}

DickeKet apply_collective(CollectiveOp op, const DickeKet& ket) {
  return DickeKet(ket.spin(), collective_matrix(ket.spin(), op) * ket.amps());
}

TwoEnsembleKet apply_collective(CollectiveOp op, const TwoEnsembleKet& ket, Ensemble which) {
  if (which == Ensemble::Sum && op == CollectiveOp::Casimir) {
    const ProductBasis basis{ket.first(), ket.second()};
    return TwoEnsembleKet::from_flat(ket.first(), ket.second(), operator_matrix(basis, op) * ket.flat());
  }
  CMatrix out = CMatrix::Zero(ket.amps().rows(), ket.amps().cols());
  if (which != Ensemble::Second) out += collective_matrix(ket.first(), op) * ket.amps();
  if (which != Ensemble::First) {
    const SpMat m2 = collective_matrix(ket.second(), op);
    out += ket.amps() * SpMat(m2.transpose());
  }
  return TwoEnsembleKet(ket.first(), ket.second(), std::move(out));
}

TruncatedManifoldKet apply_collective(CollectiveOp op, const TruncatedManifoldKet& ket, Ensemble which) {
  const bool coupling = which != Ensemble::Sum && op != CollectiveOp::Casimir;
  if (!coupling) {
    return TruncatedManifoldKet(ket.basis(), operator_matrix(ket.basis(), op, which) * ket.amps());
  }
  const CoupledBasis larger = ket.basis().extended(1);
  const TruncatedManifoldKet big = ket.embedded(larger);
  return TruncatedManifoldKet(larger, larger.ensemble(op, which) * big.amps());
}

Ket apply_collective(CollectiveOp op, const Ket& ket, Ensemble which) {
  return std::visit(overloaded{
                        [&](const DickeKet& k) -> Ket {
                          if (which == Ensemble::Second) throw std::invalid_argument("apply_collective: selector out of range");
                          return apply_collective(op, k);
                        },
                        [&](const TwoEnsembleKet& k) -> Ket { return apply_collective(op, k, which); },
                        [&](const TruncatedManifoldKet& k) -> Ket { return apply_collective(op, k, which); },
                    },
                    ket);
}

DickeKet rotate_y(const DickeKet& ket, double phi) {
  const RMatrix d = wigner_small_d(ket.spin(), phi);
  return DickeKet(ket.spin(), d.cast<cplx>() * ket.amps());
}

TwoEnsembleKet rotate_y(const TwoEnsembleKet& ket, double phi, Ensemble which) {
  CMatrix a = ket.amps();
  if (which != Ensemble::Second) a = wigner_small_d(ket.first(), phi).cast<cplx>() * a;
  if (which != Ensemble::First) a = a * wigner_small_d(ket.second(), phi).transpose().cast<cplx>();
  return TwoEnsembleKet(ket.first(), ket.second(), std::move(a));
}

TruncatedManifoldKet rotate_y(const TruncatedManifoldKet& ket, double phi) {
  CVector a(ket.amps().size());
  const CoupledBasis& b = ket.basis();
  for (int k = 0; k < b.n_blocks(); ++k) {
    const SpinLength s = b.block_spin(k);
    a.segment(b.offset(k), s.dim()) = wigner_small_d(s, phi).cast<cplx>() * ket.amps().segment(b.offset(k), s.dim());
  }
  return TruncatedManifoldKet(b, std::move(a));
}

DickeKet rotate_z(const DickeKet& ket, double phi) {
  return DickeKet(ket.spin(), ket.amps().cwiseProduct(z_phases(ket.spin(), phi)));
}

TwoEnsembleKet rotate_z(const TwoEnsembleKet& ket, double phi, Ensemble which) {
  CMatrix a = ket.amps();
  if (which != Ensemble::Second) a = z_phases(ket.first(), phi).asDiagonal() * a;
  if (which != Ensemble::First) a = a * z_phases(ket.second(), phi).asDiagonal();
  return TwoEnsembleKet(ket.first(), ket.second(), std::move(a));
}

TruncatedManifoldKet rotate_z(const TruncatedManifoldKet& ket, double phi) {
  const CoupledBasis& b = ket.basis();
  CVector a = ket.amps();
  for (int i = 0; i < b.dim(); ++i) a(i) *= std::exp(-kI * (b.m_of(i) * phi));
  return TruncatedManifoldKet(b, std::move(a));
}

SpMat product_matrix(const BasisDescriptor& basis, const OperatorProduct& product) {
  auto multiply = [&](const BasisDescriptor& b) {
    SpMat acc = sparse_identity(basis_dim(b));
    for (const auto& f : product) acc = SpMat(acc * operator_matrix(b, f.op, f.which));
    return acc;
  };
  if (const auto* cb = std::get_if<CoupledBasis>(&basis); cb && couples_blocks(product)) {
    const CoupledBasis larger = cb->extended(coupling_factors(product));
    return cb->restrict(multiply(BasisDescriptor{larger}));
  }
  return multiply(basis);
}

cplx expectation(const Ket& ket, const OperatorProduct& product) {
  const CVector a = flat_amplitudes(ket);
  return a.dot(product_matrix(basis_of(ket), product) * a);
}

cplx expectation(const DensityOperator& rho, const OperatorProduct& product) {
  const SpMat op = product_matrix(rho.basis(), product);
  // Tr(rho O) = sum_ij rho_ji O_ij
  cplx acc = 0.0;
  for (int i = 0; i < op.outerSize(); ++i) {
    for (SpMat::InnerIterator it(op, i); it; ++it) acc += rho.matrix()(it.col(), it.row()) * it.value();
  }
  return acc;
}

}  // namespace spinforge
