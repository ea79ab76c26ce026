#include <cmath>
#include <stdexcept>
#include <string>

#include "spinforge/core/operations.hpp"
#include "spinforge/dicke/evolution.hpp"

namespace spinforge {

namespace {

// Bands k = 0, 1, 2 of rho with b_k[j] = rho(j + k, j). H is diagonal and S- lowers both
// indices, so the bands evolve independently and carry every first and second moment.
EvolutionResult oat_bands(int atoms, double chi, double gamma, std::span<const double> times,
                          const OatMasterOptions& opts) {
  const SpinLength s = SpinLength::from_atoms(atoms);
  const int d = s.dim();
  Eigen::VectorXd c(d), m(d), energy(d);
  for (int i = 0; i < d; ++i) {
    m(i) = s.m_at(i);
    c(i) = lowering_coefficient(s.value(), m(i));
    energy(i) = opts.twist_only ? chi * m(i) * m(i) : chi * c(i) * c(i);
  }

  constexpr int kBands = 3;
  Eigen::ArrayXXcd gen = Eigen::ArrayXXcd::Zero(d, kBands);
  for (int k = 0; k < kBands; ++k) {
    for (int j = 0; j + k < d; ++j) {
      const int a = j + k;
      gen(j, k) = cplx(-0.5 * gamma * (c(a) * c(a) + c(j) * c(j)), -(energy(a) - energy(j)));
    }
  }
  // feed from rho(a+1, j+1) with weight gamma c_{a+1} c_{j+1}
  Eigen::ArrayXXd feed = Eigen::ArrayXXd::Zero(d, kBands);
  for (int k = 0; k < kBands; ++k) {
    for (int j = 0; j + k + 1 < d; ++j) feed(j, k) = gamma * c(j + k + 1) * c(j + 1);
  }

  const CVector psi = coherent_state(s, Vec3::UnitX()).amps();
  CMatrix y0 = CMatrix::Zero(d, kBands);
  for (int k = 0; k < kBands; ++k)
    for (int j = 0; j + k < d; ++j) y0(j, k) = psi(j + k) * std::conj(psi(j));

  auto rhs = [&](double, const CMatrix& y, CMatrix& out) {
    out.setZero();
    if (gamma == 0.0) return;
    for (int k = 0; k < kBands; ++k)
      for (int j = 0; j + k + 1 < d; ++j) out(j, k) = feed(j, k) * y(j + 1, k);
  };

  EvolutionResult res;
  res.backend = "band";
  res.axes = AxisPair::SySz;
  res.atoms = atoms;
  res.records.resize(times.size());
  auto observe = [&](std::size_t idx, double t, const CMatrix& y) {
    MomentRecord& r = res.records[idx];
    r.t = t;
    double trace = 0.0, sz = 0.0, sz2 = 0.0, spsm = 0.0, e = 0.0;
    for (int i = 0; i < d; ++i) {
      const double p = y(i, 0).real();
      trace += p;
      sz += m(i) * p;
      sz2 += m(i) * m(i) * p;
      spsm += c(i) * c(i) * p;
      e += energy(i) * p;
    }
    cplx sminus = 0.0, sminus_sz = 0.0, sminus2 = 0.0;
    for (int j = 0; j + 1 < d; ++j) {
      sminus += c(j + 1) * y(j, 1);
      sminus_sz += c(j + 1) * (2.0 * m(j + 1) - 1.0) * y(j, 1);
    }
    for (int j = 0; j + 2 < d; ++j) sminus2 += c(j + 2) * c(j + 1) * y(j, 2);
    const double smsp = spsm - 2.0 * sz;  // S-S+ = S+S- - 2Sz
    r.mean = Vec3(sminus.real(), -sminus.imag(), sz);
    r.second(0, 0) = 0.25 * (2.0 * sminus2.real() + spsm + smsp);
    r.second(1, 1) = 0.25 * (-2.0 * sminus2.real() + spsm + smsp);
    r.second(2, 2) = sz2;
    r.second(0, 1) = r.second(1, 0) = -0.5 * sminus2.imag();
    r.second(0, 2) = r.second(2, 0) = 0.5 * sminus_sz.real();
    r.second(1, 2) = r.second(2, 1) = -0.5 * sminus_sz.imag();
    r.lab_sz = sz;
    r.emission = spsm;
    r.energy = e;
    r.trace_drift = std::abs(trace - 1.0);
  };
  res.stats = integrate_lawson(y0, times.front(), gen, rhs, times, opts.integrator, observe);
  attach_squeezing(res);
  return res;
}

}  // namespace

EvolutionResult evolve_oat_master(int atoms, double chi, double gamma, std::span<const double> times,
                                  const OatMasterOptions& opts) {
  if (atoms < 1) throw std::invalid_argument("evolve_oat_master: need at least one atom");
  if (gamma < 0.0) throw std::invalid_argument("evolve_oat_master: collective rate must be non-negative");
  if (times.empty()) throw std::invalid_argument("evolve_oat_master: empty time grid");
  if (atoms > opts.max_atoms) {
    throw std::length_error("evolve_oat_master: N = " + std::to_string(atoms) + " exceeds the cap of " +
                            std::to_string(opts.max_atoms) +
                            "; use trajectory_unravel or the TWA solver for larger ensembles");
  }
  EvolutionResult res;
  if (opts.full_density) {
    LindbladSpec spec;
    spec.hamiltonian = opts.twist_only ? HamiltonianKind::OATTwistOnly : HamiltonianKind::OAT;
    spec.chi = chi;
    spec.gamma = gamma;
    spec.jumps = {JumpKind::CollectiveEmission};
    const BasisDescriptor basis = DickeBasis{SpinLength::from_atoms(atoms)};
    const SpinModel model = build_model(spec, basis);
    const CVector psi = flat_amplitudes(initial_state(spec, basis));
    res = evolve_density(model, psi * psi.adjoint(), times, opts.integrator, basis_dim(basis) <= 300);
  } else {
    res = oat_bands(atoms, chi, gamma, times, opts);
  }
  res.metadata["model"] = opts.twist_only ? "oat_twist_only" : "oat";
  res.metadata["atoms"] = atoms;
  res.metadata["chi"] = chi;
  res.metadata["gamma"] = gamma;
  res.metadata["rtol"] = opts.integrator.rtol;
  res.metadata["atol"] = opts.integrator.atol;
  return res;
}

}  // namespace spinforge
