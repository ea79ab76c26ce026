#pragma once

#include <stdexcept>
#include <string_view>

#include "spinforge/core/types.hpp"

namespace spinforge {

/// Spin quantum number stored as 2S so half-integers are exact.
class SpinLength {
 public:
  constexpr SpinLength() = default;

  static SpinLength from_twice(int twice_s) {
    if (twice_s < 0) throw std::invalid_argument("SpinLength: twice_S must be non-negative");
    SpinLength s;
    s.twice_ = twice_s;
    return s;
  }
  /// Fully symmetric spin of n two-level atoms, S = n/2.
  static SpinLength from_atoms(int n) { return from_twice(n); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr int dim() const { return twice_ + 1; }
  /// Magnetic quantum number at basis index i (m ascending from -S).
  constexpr double m_at(int i) const { return -value() + i; }
  constexpr double casimir() const { return value() * (value() + 1.0); }

  friend constexpr bool operator==(SpinLength a, SpinLength b) { return a.twice_ == b.twice_; }

 private:
  int twice_ = 0;
};

enum class CollectiveOp { Plus, Minus, X, Y, Z, Casimir };

/// Which ensemble an operator acts on in two-ensemble representations.
enum class Ensemble { First, Second, Sum };

std::string_view to_string(CollectiveOp op);
CollectiveOp collective_op_from_string(std::string_view name);

/// Coefficient c with S-|m> = c |m-1>.
double lowering_coefficient(double S, double m);

/// Sparse matrix of a collective operator in the Dicke basis of spin s.
SpMat collective_matrix(SpinLength s, CollectiveOp op);

/// Identity of the given dimension.
SpMat sparse_identity(int dim);

/// Kronecker product of sparse matrices, first factor is the slow index.
SpMat kron(const SpMat& a, const SpMat& b);

}  // namespace spinforge
