#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spinforge/core/operations.hpp"
#include "spinforge/dicke/evolution.hpp"
#include "split.hpp"

namespace spinforge {

namespace {

CoupledBasis tss_basis(int atoms, const TssOptions& o) {
  int n1 = o.atoms_first, n2 = o.atoms_second;
  if (n1 < 0 && n2 < 0) {
    if (atoms % 2 != 0) throw std::invalid_argument("TSS needs an even atom number");
    n1 = n2 = atoms / 2;
  } else if (n1 < 0 || n2 < 0) {
    throw std::invalid_argument("TSS: give both ensemble sizes or neither");
  }
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("TSS: each ensemble needs at least one atom");
  if (o.n_trunc < 1) throw std::invalid_argument("TSS: n_trunc must be at least 1");
  return CoupledBasis(n1, n2, o.n_trunc);
}

void check_truncation(EvolutionResult& res, const CoupledBasis& basis, const TssOptions& o) {
  double worst = 0.0;
  // the unitary part only couples blocks of equal parity, so the last block alone can be empty
  for (const auto& r : res.records) {
    const auto& pop = r.block_populations;
    if (pop.empty()) continue;
    const double tail = pop.back() + (pop.size() > 1 ? pop[pop.size() - 2] : 0.0);
    worst = std::max(worst, tail);
  }
  res.metadata["n_trunc"] = basis.n_blocks();
  res.metadata["truncation_complete"] = basis.complete();
  res.metadata["max_lowest_two_block_population"] = worst;
  if (!basis.complete() && worst > o.convergence_tolerance) {
    res.converged = false;
    std::ostringstream msg;
    msg << "truncation not converged: two lowest retained blocks reach population " << worst << " > "
        << o.convergence_tolerance << "; raise n_trunc above " << basis.n_blocks();
    res.warnings.push_back(msg.str());
  }
}

void describe(EvolutionResult& res, int atoms, const CoupledBasis& basis, double chi, double gamma,
              const TssOptions& o) {
  res.atoms = atoms;
  res.metadata["model"] = "tss_rotated";
  res.metadata["atoms"] = atoms;
  res.metadata["atoms_first"] = basis.twice_j1();
  res.metadata["atoms_second"] = basis.twice_j2();
  res.metadata["dimension"] = basis.dim();
  res.metadata["chi"] = chi;
  res.metadata["gamma"] = gamma;
  res.metadata["variant"] = o.variant == TssVariant::Full ? "full" : "sy_only";
  res.metadata["rtol"] = o.integrator.rtol;
  res.metadata["atol"] = o.integrator.atol;
}

}  // namespace

EvolutionResult evolve_tss_unitary_truncated(int atoms, double chi, std::span<const double> times,
                                             const TssOptions& opts) {
  return evolve_tss_master_truncated(atoms, chi, 0.0, times, opts);
}

EvolutionResult evolve_tss_master_truncated(int atoms, double chi, double gamma, std::span<const double> times,
                                            const TssOptions& opts) {
  if (gamma < 0.0) throw std::invalid_argument("TSS: collective rate must be non-negative");
  if (times.empty()) throw std::invalid_argument("TSS: empty time grid");
  const CoupledBasis basis = tss_basis(atoms, opts);
  LindbladSpec spec;
  spec.hamiltonian = HamiltonianKind::TSSRotated;
  spec.chi = chi;
  spec.gamma = gamma;
  spec.jumps = {opts.variant == TssVariant::Full ? JumpKind::RotatedFrameFull : JumpKind::RotatedFrameSyOnly};
  const SpinModel model = build_model(spec, basis);
  const CVector psi0 = flat_amplitudes(initial_state(spec, basis));

  EvolutionResult res;
  std::string notice;
  if (model.jumps.empty()) {
    res = evolve_pure(model, psi0, times, opts.integrator);
  } else {
    TssBackend backend = opts.backend;
    if (backend == TssBackend::Auto) {
      const double need = dense_liouville_bytes(basis.dim());
      const double budget = memory_budget_bytes(opts.budget_gib);
      backend = need <= budget ? TssBackend::Dense : TssBackend::Trajectories;
      if (backend == TssBackend::Trajectories) {
        std::ostringstream msg;
        msg << "dense density matrix needs " << need / (1024.0 * 1024.0 * 1024.0) << " GiB over the "
            << budget / (1024.0 * 1024.0 * 1024.0) << " GiB budget; using trajectories";
        notice = msg.str();
      }
    }
    if (backend == TssBackend::Dense) {
      res = evolve_density(model, psi0 * psi0.adjoint(), times, opts.integrator, basis.dim() <= 300);
    } else {
      res = trajectory_unravel(model, psi0, times, opts.trajectories, opts.integrator);
    }
  }
  if (!notice.empty()) res.warnings.push_back(notice);
  describe(res, atoms, basis, chi, gamma, opts);
  attach_squeezing(res);
  check_truncation(res, basis, opts);
  return res;
}

EvolutionResult evolve_tss_lab(int atoms, double chi, std::span<const double> times, const IntegratorOptions& opts) {
  if (atoms % 2 != 0 || atoms < 2) throw std::invalid_argument("TSS needs an even atom number");
  if (times.empty()) throw std::invalid_argument("TSS: empty time grid");
  const SpinLength s = SpinLength::from_atoms(atoms / 2);
  const BasisDescriptor basis = ProductBasis{s, s};
  LindbladSpec lab;
  lab.hamiltonian = HamiltonianKind::TSSLab;
  lab.chi = chi;
  LindbladSpec rotated = lab;
  rotated.hamiltonian = HamiltonianKind::TSSRotated;
  const SpinModel lab_model = build_model(lab, basis);
  const SpinModel frame_model = build_model(rotated, basis);
  const CVector psi0 = flat_amplitudes(initial_state(lab, basis));
  const DiagonalSplit h = split_diagonal(lab_model.hamiltonian);
  const Eigen::ArrayXXcd gen = (-kI * h.diag).array();
  auto rhs = [&](double, const CMatrix& psi, CMatrix& out) { out.noalias() = (-kI) * (h.off * psi); };

  EvolutionResult res;
  res.backend = "lab_frame";
  res.axes = AxisPair::SyDeltaZ;
  res.atoms = atoms;
  res.records.resize(times.size());
  res.stats = integrate_lawson(CMatrix(psi0), times.front(), gen, rhs, times, opts,
                               [&](std::size_t k, double t, const CMatrix& psi) {
                                 TwoEnsembleKet ket = TwoEnsembleKet::from_flat(s, s, psi.col(0));
                                 // rotating frame of the conserved chi Sz, then the final pi pulse
                                 ket = rotate_z(rotate_z(ket, -chi * t, Ensemble::First), -chi * t, Ensemble::Second);
                                 ket = tss_frame_map(ket);
                                 MomentRecord r = moments_of_state(frame_model, ket.flat());
                                 r.energy = psi.col(0).dot(lab_model.hamiltonian * psi.col(0)).real();
                                 r.t = t;
                                 res.records[k] = std::move(r);
                               });
  res.metadata["model"] = "tss_lab";
  res.metadata["atoms"] = atoms;
  res.metadata["chi"] = chi;
  attach_squeezing(res);
  return res;
}

}  // namespace spinforge
