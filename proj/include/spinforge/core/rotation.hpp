#pragma once

#include "spinforge/core/spin.hpp"

namespace spinforge {

/// Wigner small-d matrix d^S_{m',m}(beta) = <S m'| exp(-i beta Sy) |S m>, rows m', columns m,
/// both ascending from -S. Built from the spectrum of the tridiagonal Sx.
RMatrix wigner_small_d(SpinLength s, double beta);

/// Column d^S_{m,S}(theta) in closed form; amplitudes of the rotated stretched state.
Eigen::VectorXd stretched_column(SpinLength s, double theta);

}  // namespace spinforge
