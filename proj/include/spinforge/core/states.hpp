#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "spinforge/core/coupled_basis.hpp"
#include "spinforge/core/spin.hpp"

namespace spinforge {

/// Symmetric (Dicke) manifold of one ensemble.
struct DickeBasis {
  SpinLength spin;
  friend bool operator==(const DickeBasis&, const DickeBasis&) = default;
};

/// Uncoupled product |m1> (x) |m2>, flattened as i1 * dim2 + i2.
struct ProductBasis {
  SpinLength first;
  SpinLength second;
  friend bool operator==(const ProductBasis&, const ProductBasis&) = default;
};

using BasisDescriptor = std::variant<DickeBasis, ProductBasis, CoupledBasis>;

int basis_dim(const BasisDescriptor& basis);
std::string basis_name(const BasisDescriptor& basis);
/// Matrix of a collective operator on the given basis. For a CoupledBasis the operator is the
/// restriction to the retained blocks; products should be formed on an extended basis.
SpMat operator_matrix(const BasisDescriptor& basis, CollectiveOp op, Ensemble which = Ensemble::Sum);

class DickeKet {
 public:
  DickeKet(SpinLength spin, CVector amps);
  static DickeKet basis_state(SpinLength spin, double m);

  SpinLength spin() const { return spin_; }
  const CVector& amps() const { return amps_; }
  double norm() const { return amps_.norm(); }
  DickeKet normalized() const;

 private:
  SpinLength spin_;
  CVector amps_;
};

class TwoEnsembleKet {
 public:
  TwoEnsembleKet(SpinLength first, SpinLength second, CMatrix amps);
  static TwoEnsembleKet product(const DickeKet& a, const DickeKet& b);
  static TwoEnsembleKet from_flat(SpinLength first, SpinLength second, const CVector& flat);

  SpinLength first() const { return first_; }
  SpinLength second() const { return second_; }
  const CMatrix& amps() const { return amps_; }
  /// Amplitudes in the ProductBasis ordering.
  CVector flat() const;
  double norm() const { return amps_.norm(); }
  TwoEnsembleKet normalized() const;

 private:
  SpinLength first_;
  SpinLength second_;
  CMatrix amps_;
};

class TruncatedManifoldKet {
 public:
  TruncatedManifoldKet(CoupledBasis basis, CVector amps);

  const CoupledBasis& basis() const { return basis_; }
  const CVector& amps() const { return amps_; }
  int atoms() const { return basis_.twice_j1() + basis_.twice_j2(); }
  int n_trunc() const { return basis_.n_blocks(); }
  double norm() const { return amps_.norm(); }

  std::vector<std::pair<SpinLength, CVector>> blocks() const;
  std::vector<double> block_populations() const;
  double lowest_block_population() const;
  bool converged(double tolerance = 1e-6) const { return lowest_block_population() < tolerance; }
  /// Same state written on a basis with more blocks (zero amplitude there).
  TruncatedManifoldKet embedded(const CoupledBasis& larger) const;

 private:
  CoupledBasis basis_;
  CVector amps_;
};

using Ket = std::variant<DickeKet, TwoEnsembleKet, TruncatedManifoldKet>;

BasisDescriptor basis_of(const Ket& ket);
/// Amplitudes in the representation's flat ordering.
CVector flat_amplitudes(const Ket& ket);
Ket ket_from_flat(const BasisDescriptor& basis, const CVector& amps);

class DensityOperator {
 public:
  DensityOperator(BasisDescriptor basis, CMatrix matrix);
  static DensityOperator pure(const Ket& ket);

  const BasisDescriptor& basis() const { return basis_; }
  const CMatrix& matrix() const { return matrix_; }
  cplx trace() const { return matrix_.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;

 private:
  BasisDescriptor basis_;
  CMatrix matrix_;
};

}  // namespace spinforge
