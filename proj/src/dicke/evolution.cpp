#include "spinforge/dicke/evolution.hpp"

#include <cmath>
#include <cstdlib>

#include <Eigen/Eigenvalues>

namespace spinforge {

namespace {

constexpr int kSecondIndex[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};

double trace_product(const SpMat& op, const CMatrix& rho) {
  cplx acc = 0.0;
  for (int i = 0; i < op.outerSize(); ++i) {
    for (SpMat::InnerIterator it(op, i); it; ++it) acc += rho(it.col(), it.row()) * it.value();
  }
  return acc.real();
}

std::vector<double> block_populations_of(const BasisDescriptor& basis, const Eigen::VectorXd& diag) {
  std::vector<double> out;
  if (const auto* cb = std::get_if<CoupledBasis>(&basis)) {
    for (int b = 0; b < cb->n_blocks(); ++b) out.push_back(diag.segment(cb->offset(b), cb->block_spin(b).dim()).sum());
  }
  return out;
}

template <class Expect>
void fill_moments(const SpinModel& model, MomentRecord& r, Expect&& expect) {
  const ObservableSet& o = model.observables;
  for (int a = 0; a < 3; ++a) r.mean(a) = expect(o.mean[a]);
  for (int k = 0; k < 6; ++k) {
    const double v = expect(o.second[k]);
    r.second(kSecondIndex[k][0], kSecondIndex[k][1]) = v;
    r.second(kSecondIndex[k][1], kSecondIndex[k][0]) = v;
  }
  r.emission = expect(o.emission);
  r.lab_sz = expect(o.lab_sz);
  r.energy = expect(model.hamiltonian);
}

}  // namespace

MomentRecord moments_of_state(const SpinModel& model, const CVector& psi) {
  MomentRecord r;
  const double n2 = psi.squaredNorm();
  fill_moments(model, r, [&](const SpMat& op) { return psi.dot(op * psi).real() / n2; });
  r.trace_drift = std::abs(n2 - 1.0);
  r.block_populations = block_populations_of(model.basis, psi.cwiseAbs2() / n2);
  return r;
}

MomentRecord moments_of_density(const SpinModel& model, const CMatrix& rho, bool check_positivity) {
  MomentRecord r;
  fill_moments(model, r, [&](const SpMat& op) { return trace_product(op, rho); });
  r.trace_drift = std::abs(rho.trace() - 1.0);
  r.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  r.block_populations = block_populations_of(model.basis, rho.diagonal().real());
  if (check_positivity) {
    const CMatrix h = 0.5 * (rho + rho.adjoint());
    r.min_eigenvalue = Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  }
  return r;
}

double memory_budget_bytes(double budget_gib) {
  double gib = budget_gib;
  if (gib <= 0.0) {
    gib = 2.0;
    if (const char* env = std::getenv("SPINFORGE_BUDGET_GIB")) {
      char* end = nullptr;
      const double v = std::strtod(env, &end);
      if (end != env && v > 0.0) gib = v;
    }
  }
  return gib * 1024.0 * 1024.0 * 1024.0;
}

double dense_liouville_bytes(int dim) {
  // state + 7 Runge-Kutta stages + 4 scratch matrices, complex double
  return 12.0 * 16.0 * static_cast<double>(dim) * static_cast<double>(dim);
}

}  // namespace spinforge
