#include "spinforge/squeezing/squeezing.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "spinforge/core/operations.hpp"

namespace spinforge {

std::string_view to_string(AxisPair axes) { return axes == AxisPair::SySz ? "Sy,Sz" : "Sy,Dz"; }

QuadratureVariances variances_from_correlators(const QuadratureCorrelators& c) {
  const double r = std::hypot(c.A, c.B);
  QuadratureVariances v;
  v.v_minus = 0.5 * (c.C - r);
  v.v_plus = 0.5 * (c.C + r);
  v.nu = (c.A == 0.0 && c.B == 0.0) ? 0.0 : 0.5 * std::atan2(c.B, c.A);
  return v;
}

double quadrature_variance(const QuadratureCorrelators& c, double psi) {
  return 0.5 * c.C + 0.5 * c.A * std::cos(2.0 * psi) - 0.5 * c.B * std::sin(2.0 * psi);
}

QuadratureCorrelators correlators_from_moments(const Vec3& mean, const Mat3& second, AxisPair axes) {
  const Mat3 cov = second - mean * mean.transpose();
  Vec3 n = mean.norm() > 0.0 ? Vec3(mean.normalized()) : Vec3::UnitX();
  Vec3 e1 = Vec3::UnitZ().cross(n);
  if (e1.norm() < 1e-12) e1 = Vec3::UnitX();
  e1.normalize();
  const Vec3 e2 = n.cross(e1).normalized();
  const double v11 = e1.dot(cov * e1);
  const double v22 = e2.dot(cov * e2);
  const double v12 = e1.dot(cov * e2);
  QuadratureCorrelators c;
  c.A = v11 - v22;
  c.B = 2.0 * v12;
  c.C = v11 + v22;
  c.mean_spin = mean;
  c.axes = axes;
  return c;
}

double squeezing_parameter(double v_minus, double spin_length, double atoms) {
  if (!(spin_length > 0.0)) throw std::domain_error("squeezing parameter undefined for zero spin length");
  return atoms * v_minus / (spin_length * spin_length);
}

double to_db(double ratio) { return 10.0 * std::log10(ratio); }

SqueezingReport squeezing_report(const QuadratureCorrelators& c, double atoms) {
  const QuadratureVariances v = variances_from_correlators(c);
  SqueezingReport r;
  r.v_minus = v.v_minus;
  r.v_plus = v.v_plus;
  r.nu = v.nu;
  r.psi_min = 0.5 * kPi - v.nu;
  r.spin_length = c.mean_spin.norm();
  r.xi2 = squeezing_parameter(v.v_minus, r.spin_length, atoms);
  r.xi2_db = to_db(r.xi2);
  r.xi2_nominal = v.v_minus / (0.25 * atoms);
  r.xi2_nominal_db = to_db(r.xi2_nominal);
  return r;
}

TwoEnsembleMoments two_ensemble_moments(const TwoEnsembleKet& ket) {
  const ProductBasis basis{ket.first(), ket.second()};
  const CVector psi = ket.flat();
  const CollectiveOp ops[3] = {CollectiveOp::X, CollectiveOp::Y, CollectiveOp::Z};
  std::array<CVector, 6> applied;
  for (int e = 0; e < 2; ++e) {
    for (int a = 0; a < 3; ++a) {
      applied[3 * e + a] = operator_matrix(basis, ops[a], e == 0 ? Ensemble::First : Ensemble::Second) * psi;
    }
  }
  TwoEnsembleMoments m;
  for (int a = 0; a < 6; ++a) {
    m.mean(a) = psi.dot(applied[a]).real();
    for (int b = 0; b < 6; ++b) m.second(a, b) = applied[a].dot(applied[b]).real();
  }
  return m;
}

SpinMoments total_spin_moments(const Ket& ket) {
  const BasisDescriptor basis = basis_of(ket);
  const CVector psi = flat_amplitudes(ket);
  const CollectiveOp ops[3] = {CollectiveOp::X, CollectiveOp::Y, CollectiveOp::Z};
  std::array<CVector, 3> applied;
  for (int a = 0; a < 3; ++a) applied[a] = operator_matrix(basis, ops[a]) * psi;
  SpinMoments m;
  for (int a = 0; a < 3; ++a) {
    m.mean(a) = psi.dot(applied[a]).real();
    for (int b = 0; b < 3; ++b) m.second(a, b) = applied[a].dot(applied[b]).real();
  }
  return m;
}

SpinMoments tss_frame_map(const TwoEnsembleMoments& lab) {
  Eigen::Matrix<double, 3, 6> t = Eigen::Matrix<double, 3, 6>::Zero();
  t(0, 0) = 1.0;
  t(0, 3) = -1.0;
  t(1, 1) = 1.0;
  t(1, 4) = 1.0;
  t(2, 2) = 1.0;
  t(2, 5) = -1.0;
  SpinMoments m;
  m.mean = t * lab.mean;
  m.second = t * lab.second * t.transpose();
  return m;
}

TwoEnsembleKet tss_frame_map(const TwoEnsembleKet& lab) { return rotate_y(lab, kPi, Ensemble::Second); }

CavityField cavity_field_estimate(cplx s_minus, double s_plus_s_minus, double g, double kappa, double detuning) {
  if (detuning == 0.0 && kappa == 0.0) throw std::domain_error("cavity_field_estimate: detuning and linewidth both zero");
  const cplx factor = 2.0 / cplx(2.0 * detuning, kappa);
  CavityField f;
  f.amplitude = factor * g * s_minus;
  f.photons = std::norm(factor) * g * g * s_plus_s_minus;
  return f;
}

CavityField cavity_field_estimate(const Ket& ket, double g, double kappa, double detuning) {
  const cplx sm = expectation(ket, {{CollectiveOp::Minus}});
  const double spsm = expectation(ket, {{CollectiveOp::Plus}, {CollectiveOp::Minus}}).real();
  return cavity_field_estimate(sm, spsm, g, kappa, detuning);
}

}  // namespace spinforge
