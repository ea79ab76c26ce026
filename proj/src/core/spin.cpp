#include "spinforge/core/spin.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace spinforge {

std::string_view to_string(CollectiveOp op) {
  switch (op) {
    case CollectiveOp::Plus: return "S+";
    case CollectiveOp::Minus: return "S-";
    case CollectiveOp::X: return "Sx";
    case CollectiveOp::Y: return "Sy";
    case CollectiveOp::Z: return "Sz";
    case CollectiveOp::Casimir: return "S2";
  }
  return "?";
}

CollectiveOp collective_op_from_string(std::string_view name) {
  for (auto op : {CollectiveOp::Plus, CollectiveOp::Minus, CollectiveOp::X, CollectiveOp::Y,
                  CollectiveOp::Z, CollectiveOp::Casimir}) {
    if (to_string(op) == name) return op;
  }
  throw std::invalid_argument("unknown collective operator '" + std::string(name) + "'");
}

double lowering_coefficient(double S, double m) {
  const double v = S * (S + 1.0) - m * (m - 1.0);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

SpMat collective_matrix(SpinLength s, CollectiveOp op) {
  const int d = s.dim();
  const double S = s.value();
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(2 * static_cast<std::size_t>(d));
  auto add_lowering = [&](cplx scale) {
    for (int i = 1; i < d; ++i) trip.emplace_back(i - 1, i, scale * lowering_coefficient(S, s.m_at(i)));
  };
  auto add_raising = [&](cplx scale) {
    for (int i = 1; i < d; ++i) trip.emplace_back(i, i - 1, scale * lowering_coefficient(S, s.m_at(i)));
  };
  switch (op) {
    case CollectiveOp::Plus: add_raising(1.0); break;
    case CollectiveOp::Minus: add_lowering(1.0); break;
    case CollectiveOp::X:
      add_raising(0.5);
      add_lowering(0.5);
      break;
    case CollectiveOp::Y:
      add_raising(-0.5 * kI);
      add_lowering(0.5 * kI);
      break;
    case CollectiveOp::Z:
      for (int i = 0; i < d; ++i) trip.emplace_back(i, i, s.m_at(i));
      break;
    case CollectiveOp::Casimir:
      for (int i = 0; i < d; ++i) trip.emplace_back(i, i, s.casimir());
      break;
  }
  SpMat m(d, d);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat sparse_identity(int dim) {
  SpMat m(dim, dim);
  m.setIdentity();
  return m;
}

SpMat kron(const SpMat& a, const SpMat& b) {
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int i = 0; i < a.outerSize(); ++i) {
    for (SpMat::InnerIterator ia(a, i); ia; ++ia) {
      for (int k = 0; k < b.outerSize(); ++k) {
        for (SpMat::InnerIterator ib(b, k); ib; ++ib) {
          trip.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                            ia.value() * ib.value());
        }
      }
    }
  }
  SpMat m(a.rows() * b.rows(), a.cols() * b.cols());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace spinforge
