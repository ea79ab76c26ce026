#include "spinforge/core/coupled_basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace spinforge {

CoupledBasis::CoupledBasis(int twice_j1, int twice_j2, int n_blocks)
    : twice_j1_(twice_j1), twice_j2_(twice_j2) {
  if (twice_j1 < 0 || twice_j2 < 0) throw std::invalid_argument("CoupledBasis: negative spin");
  if (n_blocks < 1) throw std::invalid_argument("CoupledBasis: need at least one block");
  const int blocks = std::min(n_blocks, max_blocks());
  for (int b = 0; b < blocks; ++b) {
    const int tJ = twice_j1 + twice_j2 - 2 * b;
    twice_J_.push_back(tJ);
    offset_.push_back(dim_);
    dim_ += tJ + 1;
  }
}

int CoupledBasis::max_blocks() const { return std::min(twice_j1_, twice_j2_) + 1; }

int CoupledBasis::block_of(int index) const {
  const auto it = std::upper_bound(offset_.begin(), offset_.end(), index);
  return static_cast<int>(it - offset_.begin()) - 1;
}

double CoupledBasis::m_of(int index) const {
  const int b = block_of(index);
  return -0.5 * twice_J_[b] + (index - offset_[b]);
}

CoupledBasis CoupledBasis::extended(int extra) const {
  return CoupledBasis(twice_j1_, twice_j2_, n_blocks() + extra);
}

SpMat CoupledBasis::total(CollectiveOp op) const {
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int b = 0; b < n_blocks(); ++b) {
    const SpMat blk = collective_matrix(block_spin(b), op);
    for (int r = 0; r < blk.outerSize(); ++r) {
      for (SpMat::InnerIterator it(blk, r); it; ++it) {
        trip.emplace_back(offset_[b] + it.row(), offset_[b] + it.col(), it.value());
      }
    }
  }
  SpMat m(dim_, dim_);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat CoupledBasis::difference_z() const {
  const double j1 = 0.5 * twice_j1_;
  const double j2 = 0.5 * twice_j2_;
  const double casimir_gap = j1 * (j1 + 1.0) - j2 * (j2 + 1.0);
  const double jd2 = (j1 - j2) * (j1 - j2);
  const double js2 = (j1 + j2 + 1.0) * (j1 + j2 + 1.0);
  std::vector<Eigen::Triplet<cplx>> trip;
  for (int b = 0; b < n_blocks(); ++b) {
    const double J = 0.5 * twice_J_[b];
    const int d = twice_J_[b] + 1;
    for (int i = 0; i < d; ++i) {
      const double M = -J + i;
      if (J > 0.0) trip.emplace_back(offset_[b] + i, offset_[b] + i, M * casimir_gap / (J * (J + 1.0)));
    }
    if (b + 1 < n_blocks()) {
      // <J-1, M| Dz |J, M> for |M| <= J-1
      const double J2 = J * J;
      const double radial = (J2 - jd2) * (js2 - J2) / (4.0 * J2 * (4.0 * J2 - 1.0));
      for (int k = 0; k < d - 2; ++k) {
        const double M = -J + 1.0 + k;
        const double v = 2.0 * std::sqrt(std::max(0.0, (J2 - M * M) * radial));
        const int row = offset_[b + 1] + k;
        const int col = offset_[b] + k + 1;
        trip.emplace_back(row, col, v);
        trip.emplace_back(col, row, v);
      }
    }
  }
  SpMat m(dim_, dim_);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat CoupledBasis::difference_plus() const {
  // [J+, Dz] = -D+ for the vector operator D; exact on this index range
  const SpMat dz = difference_z();
  const SpMat jp = total(CollectiveOp::Plus);
  SpMat out = dz * jp - jp * dz;
  out.prune(cplx(0.0));
  return out;
}

SpMat CoupledBasis::difference(CollectiveOp op) const {
  switch (op) {
    case CollectiveOp::Z: return difference_z();
    case CollectiveOp::Plus: return difference_plus();
    case CollectiveOp::Minus: return SpMat(difference_plus().adjoint());
    case CollectiveOp::X: {
      const SpMat p = difference_plus();
      return SpMat(0.5 * (p + SpMat(p.adjoint())));
    }
    case CollectiveOp::Y: {
      const SpMat p = difference_plus();
      return SpMat((-0.5 * kI) * (p - SpMat(p.adjoint())));
    }
    case CollectiveOp::Casimir: break;
  }
  throw std::invalid_argument("CoupledBasis::difference: Casimir of D is not supported");
}

SpMat CoupledBasis::ensemble(CollectiveOp op, Ensemble which) const {
  if (which == Ensemble::Sum) return total(op);
  if (op == CollectiveOp::Casimir) {
    const double j = 0.5 * (which == Ensemble::First ? twice_j1_ : twice_j2_);
    return SpMat(j * (j + 1.0) * sparse_identity(dim_));
  }
  const double sign = which == Ensemble::First ? 1.0 : -1.0;
  return SpMat(0.5 * (total(op) + sign * difference(op)));
}

SpMat CoupledBasis::restrict(const SpMat& op_on_larger) const {
  if (op_on_larger.rows() < dim_) throw std::invalid_argument("CoupledBasis::restrict: operator too small");
  return op_on_larger.topLeftCorner(dim_, dim_);
}

}  // namespace spinforge
