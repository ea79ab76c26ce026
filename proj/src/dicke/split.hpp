#pragma once

#include "spinforge/dicke/model.hpp"

namespace spinforge {

struct DiagonalSplit {
  CVector diag;
  SpMat off;
};

DiagonalSplit split_diagonal(const SpMat& m);

/// H - i sum_k L_k^+ L_k, the non-Hermitian generator between jumps.
SpMat effective_hamiltonian(const SpinModel& model);

}  // namespace spinforge
