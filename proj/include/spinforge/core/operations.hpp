#pragma once

#include <vector>

#include "spinforge/core/states.hpp"

namespace spinforge {

/// Stretched state along `axis` (unit vector): R_z(phi) R_y(theta) |S, m=S>.
DickeKet coherent_state(SpinLength s, const Vec3& axis);

DickeKet apply_collective(CollectiveOp op, const DickeKet& ket);
TwoEnsembleKet apply_collective(CollectiveOp op, const TwoEnsembleKet& ket, Ensemble which);
/// Result lives on a basis with one more block whenever the operator couples J to J-1.
TruncatedManifoldKet apply_collective(CollectiveOp op, const TruncatedManifoldKet& ket, Ensemble which);
Ket apply_collective(CollectiveOp op, const Ket& ket, Ensemble which = Ensemble::Sum);

DickeKet rotate_y(const DickeKet& ket, double phi);
TwoEnsembleKet rotate_y(const TwoEnsembleKet& ket, double phi, Ensemble which);
/// Rotation of the total spin; individual-ensemble rotations leave the coupled basis.
TruncatedManifoldKet rotate_y(const TruncatedManifoldKet& ket, double phi);

DickeKet rotate_z(const DickeKet& ket, double phi);
TwoEnsembleKet rotate_z(const TwoEnsembleKet& ket, double phi, Ensemble which);
TruncatedManifoldKet rotate_z(const TruncatedManifoldKet& ket, double phi);

struct OpFactor {
  CollectiveOp op;
  Ensemble which = Ensemble::Sum;
};
/// Ordered product O1 O2 ... On; the rightmost factor acts first.
using OperatorProduct = std::vector<OpFactor>;

cplx expectation(const Ket& ket, const OperatorProduct& product);
cplx expectation(const DensityOperator& rho, const OperatorProduct& product);

/// Matrix of an operator product on a basis; coupled bases are extended internally so the
/// result is the exact projection of the product.
SpMat product_matrix(const BasisDescriptor& basis, const OperatorProduct& product);

}  // namespace spinforge
