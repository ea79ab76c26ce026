#include <algorithm>
#include <stdexcept>

#include "spinforge/dicke/evolution.hpp"
#include "split.hpp"

namespace spinforge {

namespace {

/// out = m + m^H, walked in tiles so the transposed reads stay in cache.
void add_adjoint_into(const CMatrix& m, CMatrix& out) {
  constexpr int tile = 64;
  const int d = static_cast<int>(m.rows());
  for (int jb = 0; jb < d; jb += tile) {
    for (int ib = 0; ib < d; ib += tile) {
      const int ni = std::min(tile, d - ib);
      const int nj = std::min(tile, d - jb);
      out.block(ib, jb, ni, nj) = m.block(ib, jb, ni, nj) + m.block(jb, ib, nj, ni).adjoint();
    }
  }
}

}  // namespace

DiagonalSplit split_diagonal(const SpMat& m) {
  DiagonalSplit s;
  s.diag = CVector::Zero(m.rows());
  std::vector<Eigen::Triplet<cplx>> off;
  for (int i = 0; i < m.outerSize(); ++i) {
    for (SpMat::InnerIterator it(m, i); it; ++it) {
      if (it.row() == it.col()) s.diag(it.row()) += it.value();
      else off.emplace_back(it.row(), it.col(), it.value());
    }
  }
  s.off.resize(m.rows(), m.cols());
  s.off.setFromTriplets(off.begin(), off.end());
  return s;
}

SpMat effective_hamiltonian(const SpinModel& model) {
  SpMat h = model.hamiltonian;
  for (const SpMat& l : model.jumps) h -= SpMat(kI * SpMat(SpMat(l.adjoint()) * l));
  return h;
}

EvolutionResult evolve_density(const SpinModel& model, const CMatrix& rho0, std::span<const double> times,
                               const IntegratorOptions& opts, bool check_positivity) {
  const int d = basis_dim(model.basis);
  if (rho0.rows() != d || rho0.cols() != d) throw std::invalid_argument("evolve_density: rho0 has the wrong shape");
  if (times.empty()) throw std::invalid_argument("evolve_density: empty time grid");

  const DiagonalSplit heff = split_diagonal(effective_hamiltonian(model));
  std::vector<DiagonalSplit> jumps;
  for (const SpMat& l : model.jumps) jumps.push_back(split_diagonal(l));

  SeparableGenerator gen{-kI * heff.diag.array(), kI * heff.diag.conjugate().array()};
  // 2 sum_k l_a conj(l_b) does not factor, so it stays in the explicit part
  Eigen::ArrayXXcd cross;
  for (const auto& j : jumps) {
    if (j.diag.cwiseAbs().maxCoeff() == 0.0) continue;
    const Eigen::ArrayXXcd outer = (2.0 * j.diag * j.diag.adjoint()).array();
    if (cross.size() == 0) cross = outer;
    else cross += outer;
  }
  CMatrix half(d, d), x(d, d), xt(d, d);
  // Every term below comes in a pair T + T^H, so half of the right-hand side is built and then symmetrized.
  // The jump term O rho O^H is itself Hermitian and enters half once.
  auto rhs = [&](double, const CMatrix& rho, CMatrix& out) {
    half.noalias() = heff.off * rho;
    half *= -kI;
    for (const auto& j : jumps) {
      if (j.off.nonZeros() == 0) continue;
      x.noalias() = j.off * rho;
      half.noalias() += 2.0 * (x * j.diag.conjugate().asDiagonal());
      xt = x.adjoint();
      half.noalias() += j.off * xt;
    }
    add_adjoint_into(half, out);
    if (cross.size() != 0) out.array() += cross * rho.array();
  };

  EvolutionResult res;
  res.backend = "liouville";
  res.axes = model.axes;
  res.atoms = model.atoms;
  res.records.resize(times.size());
  res.stats = integrate_lawson(rho0, times.front(), gen, rhs, times, opts,
                               [&](std::size_t k, double t, const CMatrix& rho) {
                                 res.records[k] = moments_of_density(model, rho, check_positivity);
                                 res.records[k].t = t;
                               });
  attach_squeezing(res);
  return res;
}

EvolutionResult evolve_pure(const SpinModel& model, const CVector& psi0, std::span<const double> times,
                            const IntegratorOptions& opts) {
  if (!model.jumps.empty()) throw std::invalid_argument("evolve_pure: model has jump operators; use trajectories");
  const int d = basis_dim(model.basis);
  if (psi0.size() != d) throw std::invalid_argument("evolve_pure: psi0 has the wrong length");
  if (times.empty()) throw std::invalid_argument("evolve_pure: empty time grid");
  const DiagonalSplit h = split_diagonal(model.hamiltonian);
  const Eigen::ArrayXXcd gen = (-kI * h.diag).array();

  auto rhs = [&](double, const CMatrix& psi, CMatrix& out) { out.noalias() = (-kI) * (h.off * psi); };

  EvolutionResult res;
  res.backend = "pure";
  res.axes = model.axes;
  res.atoms = model.atoms;
  res.records.resize(times.size());
  res.stats = integrate_lawson(CMatrix(psi0), times.front(), gen, rhs, times, opts,
                               [&](std::size_t k, double t, const CMatrix& psi) {
                                 res.records[k] = moments_of_state(model, psi.col(0));
                                 res.records[k].t = t;
                               });
  attach_squeezing(res);
  return res;
}

}  // namespace spinforge
