#pragma once

#include <array>
#include <string>
#include <vector>

#include "spinforge/core/states.hpp"
#include "spinforge/squeezing/squeezing.hpp"

namespace spinforge {

enum class HamiltonianKind {
  OAT,           ///< chi S+S-
  OATTwistOnly,  ///< chi Sz^2
  TSSRotated,    ///< chi [(Sx1 - Sx2)^2 + (Sy1 + Sy2)^2], frame of the back-to-back spins
  TSSLab,        ///< chi S+S- on two ensembles
};

enum class JumpKind {
  CollectiveEmission,  ///< sqrt(G/2) S-
  RotatedFrameFull,    ///< sqrt(G/2) [(Sx1 - Sx2) - i (Sy1 + Sy2)]
  RotatedFrameSyOnly,  ///< sqrt(G/2) (Sy1 + Sy2)
};

std::string to_string(HamiltonianKind h);
std::string to_string(JumpKind j);

struct LindbladSpec {
  HamiltonianKind hamiltonian = HamiltonianKind::OAT;
  double chi = 1.0;    ///< may be negative (red detuning)
  double gamma = 0.0;  ///< collective emission rate, >= 0
  std::vector<JumpKind> jumps;
};

/// Operators evaluated at every output time. Means and symmetrized second moments refer to the
/// measurement frame (for TSS: after the final pi pulse, so z is the lab difference Dz).
struct ObservableSet {
  std::array<SpMat, 3> mean;
  std::array<SpMat, 6> second;  ///< xx, yy, zz, xy, xz, yz
  SpMat emission;               ///< lab-frame S+S-
  SpMat lab_sz;                 ///< lab-frame total Sz
};

/// A Lindblad problem lowered onto a concrete basis.
struct SpinModel {
  BasisDescriptor basis;
  SpMat hamiltonian;
  std::vector<SpMat> jumps;  ///< rates included
  ObservableSet observables;
  AxisPair axes = AxisPair::SySz;
  double atoms = 0.0;
};

/// Supported pairs: OAT kinds on a DickeBasis; TSSRotated on a ProductBasis or CoupledBasis;
/// TSSLab on a ProductBasis (observables are then plain lab moments).
SpinModel build_model(const LindbladSpec& spec, const BasisDescriptor& basis);

/// Initial state of each protocol on the model's basis: |N/2>_x for OAT and for the rotated
/// TSS frame, |N/4>_x (x) |-N/4>_x for the lab frame.
Ket initial_state(const LindbladSpec& spec, const BasisDescriptor& basis);

}  // namespace spinforge
