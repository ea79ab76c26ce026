#include "spinforge/core/rotation.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace spinforge {

namespace {

RMatrix half_turn(SpinLength s) {
  const int d = s.dim();
  RMatrix out = RMatrix::Zero(d, d);
  for (int b = 0; b < d; ++b) {
    // d_{-m,m}(pi) = (-1)^(S-m), and S-m = 2S-b
    const int steps = d - 1 - b;
    out(d - 1 - b, b) = (steps % 2 == 0) ? 1.0 : -1.0;
  }
  return out;
}

}  // namespace

RMatrix wigner_small_d(SpinLength s, double beta) {
  if (beta == kPi) return half_turn(s);
  const int d = s.dim();
  if (d == 1) return RMatrix::Ones(1, 1);
  // exp(-i beta Sy) = exp(-i pi/2 Sz) exp(-i beta Sx) exp(i pi/2 Sz), with Sx real tridiagonal
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd sub(d - 1);
  for (int i = 0; i + 1 < d; ++i) sub(i) = 0.5 * lowering_coefficient(s.value(), s.m_at(i + 1));
  Eigen::SelfAdjointEigenSolver<RMatrix> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  const RMatrix& v = es.eigenvectors();
  const Eigen::ArrayXd w = es.eigenvalues().array() * beta;
  const RMatrix vc = v * w.cos().matrix().asDiagonal();
  const RMatrix vs = v * w.sin().matrix().asDiagonal();
  const RMatrix re = vc * v.transpose();
  const RMatrix im = -(vs * v.transpose());
  RMatrix out(d, d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      // (-i)^(a-b) times the complex entry; the product is real
      switch (((a - b) % 4 + 4) % 4) {
        case 0: out(a, b) = re(a, b); break;
        case 1: out(a, b) = im(a, b); break;
        case 2: out(a, b) = -re(a, b); break;
        default: out(a, b) = -im(a, b); break;
      }
    }
  }
  return out;
}

Eigen::VectorXd stretched_column(SpinLength s, double theta) {
  const int d = s.dim();
  const int n = s.twice();
  const double c = std::cos(0.5 * theta);
  const double sn = std::sin(0.5 * theta);
  Eigen::VectorXd out(d);
  const double log_c = std::log(std::abs(c));
  const double log_s = std::log(std::abs(sn));
  for (int i = 0; i < d; ++i) {
    // S+m = i, S-m = n-i
    const int pc = i;
    const int ps = n - i;
    if ((pc > 0 && c == 0.0) || (ps > 0 && sn == 0.0)) {
      out(i) = 0.0;
      continue;
    }
    double lg = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(pc + 1.0) - std::lgamma(ps + 1.0));
    if (pc > 0) lg += pc * log_c;
    if (ps > 0) lg += ps * log_s;
    double sign = 1.0;
    if (c < 0.0 && pc % 2 == 1) sign = -sign;
    if (sn < 0.0 && ps % 2 == 1) sign = -sign;
    out(i) = sign * std::exp(lg);
  }
  return out;
}

}  // namespace spinforge
