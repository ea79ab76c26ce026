#pragma once

#include <vector>

#include "spinforge/core/spin.hpp"

namespace spinforge {

/// Coupled basis |J, M> of two spins j1, j2, keeping the n_blocks largest J values
/// (J = j1+j2, j1+j2-1, ...). Blocks are stored in descending J, M ascending within a block,
/// so a basis with more blocks contains this one as its leading index range.
class CoupledBasis {
 public:
  CoupledBasis() = default;
  CoupledBasis(int twice_j1, int twice_j2, int n_blocks);

  int twice_j1() const { return twice_j1_; }
  int twice_j2() const { return twice_j2_; }
  int n_blocks() const { return static_cast<int>(twice_J_.size()); }
  int dim() const { return dim_; }
  int max_blocks() const;
  bool complete() const { return n_blocks() == max_blocks(); }

  SpinLength block_spin(int block) const { return SpinLength::from_twice(twice_J_[block]); }
  int offset(int block) const { return offset_[block]; }
  int block_of(int index) const;
  double m_of(int index) const;

  /// Same couple of spins with `extra` more blocks (clipped at completeness).
  CoupledBasis extended(int extra = 1) const;

  /// Collective operator of J = j1 + j2 (block diagonal).
  SpMat total(CollectiveOp op) const;
  /// Component of D = j1 - j2. Casimir is not defined for D.
  SpMat difference(CollectiveOp op) const;
  /// Operator of one ensemble, S1 = (J + D)/2 or S2 = (J - D)/2.
  SpMat ensemble(CollectiveOp op, Ensemble which) const;

  /// Leading dim x dim corner of an operator built on a basis with more blocks.
  SpMat restrict(const SpMat& op_on_larger) const;

  friend bool operator==(const CoupledBasis& a, const CoupledBasis& b) {
    return a.twice_j1_ == b.twice_j1_ && a.twice_j2_ == b.twice_j2_ && a.twice_J_ == b.twice_J_;
  }

 private:
  SpMat difference_z() const;
  SpMat difference_plus() const;

  int twice_j1_ = 0;
  int twice_j2_ = 0;
  std::vector<int> twice_J_;
  std::vector<int> offset_;
  int dim_ = 0;
};

}  // namespace spinforge
