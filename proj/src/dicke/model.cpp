#include "spinforge/dicke/model.hpp"

#include <cmath>
#include <stdexcept>

#include "spinforge/core/operations.hpp"

namespace spinforge {

namespace {

struct AxisOp {
  CollectiveOp op;
  double sign;
};

// The coupled basis is quantized along the frame's y axis: x' = x, y' = -z, z' = y.
AxisOp native_axis(const BasisDescriptor& b, int axis) {
  static constexpr AxisOp rotated[3] = {{CollectiveOp::X, 1.0}, {CollectiveOp::Z, 1.0}, {CollectiveOp::Y, -1.0}};
  static constexpr AxisOp plain[3] = {{CollectiveOp::X, 1.0}, {CollectiveOp::Y, 1.0}, {CollectiveOp::Z, 1.0}};
  return std::holds_alternative<CoupledBasis>(b) ? rotated[axis] : plain[axis];
}

BasisDescriptor widen(const BasisDescriptor& b, int extra) {
  if (const auto* cb = std::get_if<CoupledBasis>(&b)) return cb->extended(extra);
  return b;
}

SpMat narrow(const BasisDescriptor& b, const SpMat& op) {
  if (const auto* cb = std::get_if<CoupledBasis>(&b)) return cb->restrict(op);
  return op;
}

/// Frame component of J = S1 + S2 (or of the single spin) and of D = S1 - S2.
SpMat total_component(const BasisDescriptor& b, int axis) {
  const AxisOp a = native_axis(b, axis);
  return SpMat(a.sign * operator_matrix(b, a.op));
}

SpMat difference_component(const BasisDescriptor& b, int axis) {
  const AxisOp a = native_axis(b, axis);
  if (const auto* cb = std::get_if<CoupledBasis>(&b)) return SpMat(a.sign * cb->difference(a.op));
  if (!std::holds_alternative<ProductBasis>(b)) throw std::invalid_argument("difference operator needs two ensembles");
  return SpMat(a.sign * (operator_matrix(b, a.op, Ensemble::First) - operator_matrix(b, a.op, Ensemble::Second)));
}

SpMat symmetrized(const SpMat& a, const SpMat& b) { return SpMat(0.5 * (a * b + b * a)); }

ObservableSet total_spin_observables(const BasisDescriptor& b) {
  ObservableSet o;
  for (int a = 0; a < 3; ++a) o.mean[a] = total_component(b, a);
  o.second[0] = SpMat(o.mean[0] * o.mean[0]);
  o.second[1] = SpMat(o.mean[1] * o.mean[1]);
  o.second[2] = SpMat(o.mean[2] * o.mean[2]);
  o.second[3] = symmetrized(o.mean[0], o.mean[1]);
  o.second[4] = symmetrized(o.mean[0], o.mean[2]);
  o.second[5] = symmetrized(o.mean[1], o.mean[2]);
  return o;
}

void check_jump(HamiltonianKind h, JumpKind j) {
  const bool rotated = h == HamiltonianKind::TSSRotated;
  const bool rotated_jump = j != JumpKind::CollectiveEmission;
  if (rotated != rotated_jump) {
    throw std::invalid_argument("jump " + to_string(j) + " does not belong to hamiltonian " + to_string(h));
  }
}

}  // namespace

std::string to_string(HamiltonianKind h) {
  switch (h) {
    case HamiltonianKind::OAT: return "oat";
    case HamiltonianKind::OATTwistOnly: return "oat_twist_only";
    case HamiltonianKind::TSSRotated: return "tss_rotated";
    case HamiltonianKind::TSSLab: return "tss_lab";
  }
  return "?";
}

std::string to_string(JumpKind j) {
  switch (j) {
    case JumpKind::CollectiveEmission: return "collective_emission";
    case JumpKind::RotatedFrameFull: return "rotated_frame_full";
    case JumpKind::RotatedFrameSyOnly: return "rotated_frame_sy_only";
  }
  return "?";
}

SpinModel build_model(const LindbladSpec& spec, const BasisDescriptor& basis) {
  if (spec.gamma < 0.0) throw std::invalid_argument("collective rate must be non-negative");
  for (JumpKind j : spec.jumps) check_jump(spec.hamiltonian, j);

  SpinModel m;
  m.basis = basis;
  const double jump_scale = std::sqrt(0.5 * spec.gamma);

  switch (spec.hamiltonian) {
    case HamiltonianKind::OAT:
    case HamiltonianKind::OATTwistOnly: {
      const auto* db = std::get_if<DickeBasis>(&basis);
      if (!db) throw std::invalid_argument("OAT models live on a single Dicke basis");
      m.atoms = db->spin.twice();
      const SpMat sp = operator_matrix(basis, CollectiveOp::Plus);
      const SpMat sm = operator_matrix(basis, CollectiveOp::Minus);
      const SpMat sz = operator_matrix(basis, CollectiveOp::Z);
      m.hamiltonian = spec.hamiltonian == HamiltonianKind::OAT ? SpMat(spec.chi * (sp * sm)) : SpMat(spec.chi * (sz * sz));
      if (spec.gamma > 0.0 && !spec.jumps.empty()) m.jumps.push_back(SpMat(jump_scale * sm));
      m.observables = total_spin_observables(basis);
      m.observables.emission = SpMat(sp * sm);
      m.observables.lab_sz = sz;
      m.axes = AxisPair::SySz;
      break;
    }
    case HamiltonianKind::TSSLab: {
      const auto* pb = std::get_if<ProductBasis>(&basis);
      if (!pb) throw std::invalid_argument("the lab-frame TSS model lives on the two-ensemble product basis");
      m.atoms = pb->first.twice() + pb->second.twice();
      const SpMat sp = operator_matrix(basis, CollectiveOp::Plus);
      const SpMat sm = operator_matrix(basis, CollectiveOp::Minus);
      m.hamiltonian = SpMat(spec.chi * (sp * sm));
      if (spec.gamma > 0.0 && !spec.jumps.empty()) m.jumps.push_back(SpMat(jump_scale * sm));
      m.observables = total_spin_observables(basis);
      m.observables.emission = SpMat(sp * sm);
      m.observables.lab_sz = operator_matrix(basis, CollectiveOp::Z);
      m.axes = AxisPair::SySz;
      break;
    }
    case HamiltonianKind::TSSRotated: {
      if (std::holds_alternative<DickeBasis>(basis)) throw std::invalid_argument("TSS needs two ensembles");
      if (const auto* pb = std::get_if<ProductBasis>(&basis)) m.atoms = pb->first.twice() + pb->second.twice();
      if (const auto* cb = std::get_if<CoupledBasis>(&basis)) m.atoms = cb->twice_j1() + cb->twice_j2();
      // D couples neighbouring J blocks, so its products are formed one block wider and cut back
      const BasisDescriptor wide = widen(basis, 1);
      const SpMat dx_wide = difference_component(wide, 0);
      const SpMat dx = narrow(basis, dx_wide);
      const SpMat dxdx = narrow(basis, SpMat(dx_wide * dx_wide));
      const SpMat dz = narrow(basis, difference_component(wide, 2));
      const SpMat jy = total_component(basis, 1);
      const SpMat jyjy = SpMat(jy * jy);
      m.hamiltonian = SpMat(spec.chi * (dxdx + jyjy));
      if (spec.gamma > 0.0) {
        for (JumpKind j : spec.jumps) {
          if (j == JumpKind::RotatedFrameFull) m.jumps.push_back(SpMat(jump_scale * (dx - kI * jy)));
          else m.jumps.push_back(SpMat(jump_scale * jy));
        }
      }
      m.observables = total_spin_observables(basis);
      // lab S+S- = Sx^2 + Sy^2 + Sz with lab (Sx, Sy, Sz) = (Dx, Jy, Dz) of this frame
      m.observables.emission = SpMat(dxdx + jyjy + dz);
      m.observables.lab_sz = dz;
      m.axes = AxisPair::SyDeltaZ;
      break;
    }
  }
  return m;
}

Ket initial_state(const LindbladSpec& spec, const BasisDescriptor& basis) {
  return std::visit(
      [&](const auto& b) -> Ket {
        using B = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<B, DickeBasis>) {
          return coherent_state(b.spin, Vec3::UnitX());
        } else if constexpr (std::is_same_v<B, ProductBasis>) {
          const Vec3 second = spec.hamiltonian == HamiltonianKind::TSSLab ? Vec3(-Vec3::UnitX()) : Vec3::UnitX();
          return TwoEnsembleKet::product(coherent_state(b.first, Vec3::UnitX()), coherent_state(b.second, second));
        } else {
          // stretched along x inside the top block J = j1 + j2
          CVector amps = CVector::Zero(b.dim());
          const SpinLength top = b.block_spin(0);
          amps.head(top.dim()) = coherent_state(top, Vec3::UnitX()).amps();
          return TruncatedManifoldKet(b, std::move(amps));
        }
      },
      basis);
}

}  // namespace spinforge
