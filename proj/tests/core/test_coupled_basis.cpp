#include "doctest.h"
#include "test_support.hpp"

#include <algorithm>

#include "spinforge/core/coupled_basis.hpp"
#include "spinforge/core/operations.hpp"

using namespace spinforge;
using spinforge::testing::dense;

namespace {

struct Couple {
  int tj1;
  int tj2;
};

}  // namespace

TEST_CASE("individual spins obey su(2) on a complete coupled basis") {
  for (Couple c : {Couple{1, 1}, Couple{3, 2}, Couple{4, 4}, Couple{5, 3}, Couple{6, 2}}) {
    CAPTURE(c.tj1);
    CAPTURE(c.tj2);
    const CoupledBasis b(c.tj1, c.tj2, 1000);
    REQUIRE(b.complete());
    const double j1 = c.tj1 / 2.0, j2 = c.tj2 / 2.0;
    const CMatrix x1 = dense(b.ensemble(CollectiveOp::X, Ensemble::First));
    const CMatrix y1 = dense(b.ensemble(CollectiveOp::Y, Ensemble::First));
    const CMatrix z1 = dense(b.ensemble(CollectiveOp::Z, Ensemble::First));
    const CMatrix x2 = dense(b.ensemble(CollectiveOp::X, Ensemble::Second));
    const CMatrix y2 = dense(b.ensemble(CollectiveOp::Y, Ensemble::Second));
    const CMatrix z2 = dense(b.ensemble(CollectiveOp::Z, Ensemble::Second));
    const auto id = CMatrix::Identity(b.dim(), b.dim());
    CHECK((x1 * y1 - y1 * x1 - kI * z1).norm() < 1e-11);
    CHECK((y1 * z1 - z1 * y1 - kI * x1).norm() < 1e-11);
    CHECK((x2 * y2 - y2 * x2 - kI * z2).norm() < 1e-11);
    CHECK((x1 * x1 + y1 * y1 + z1 * z1 - j1 * (j1 + 1) * id).norm() < 1e-10);
    CHECK((x2 * x2 + y2 * y2 + z2 * z2 - j2 * (j2 + 1) * id).norm() < 1e-10);
    CHECK((x1 * y2 - y2 * x1).norm() < 1e-11);
    CHECK((z1 * x2 - x2 * z1).norm() < 1e-11);
  }
}

TEST_CASE("coupled and product bases share spectra") {
  const int tj = 6;
  const auto s = SpinLength::from_twice(tj);
  const CoupledBasis cb(tj, tj, 1000);
  const ProductBasis pb{s, s};
  auto h_of = [](const BasisDescriptor& b) {
    CMatrix dx = dense(operator_matrix(b, CollectiveOp::X, Ensemble::First)) -
                 dense(operator_matrix(b, CollectiveOp::X, Ensemble::Second));
    CMatrix sy = dense(operator_matrix(b, CollectiveOp::Y));
    return CMatrix(dx * dx + sy * sy + 0.3 * dense(operator_matrix(b, CollectiveOp::Z)));
  };
  Eigen::SelfAdjointEigenSolver<CMatrix> e1(h_of(cb)), e2(h_of(pb));
  CHECK((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("truncated operators are corners of the complete ones") {
  const CoupledBasis full(10, 10, 1000);
  const CoupledBasis part(10, 10, 3);
  CHECK(part.dim() == 21 + 19 + 17);
  for (auto op : {CollectiveOp::Plus, CollectiveOp::X, CollectiveOp::Z}) {
    const CMatrix big = dense(full.difference(op));
    const CMatrix small = dense(part.difference(op));
    CHECK((big.topLeftCorner(part.dim(), part.dim()) - small).norm() < 1e-12);
  }
  CHECK(part.block_spin(0).twice() == 20);
  CHECK(part.block_spin(2).twice() == 16);
  CHECK(part.block_of(21) == 1);
  CHECK(part.m_of(21) == doctest::Approx(-9.0));
  CHECK(part.extended(100) == full);
  CHECK_THROWS(part.difference(CollectiveOp::Casimir));
}

TEST_CASE("product matrices on a truncated basis use the extended space") {
  const CoupledBasis full(8, 8, 1000);
  const CoupledBasis part(8, 8, 2);
  const OperatorProduct dd{{CollectiveOp::X, Ensemble::First}, {CollectiveOp::X, Ensemble::Second}};
  const CMatrix big = dense(product_matrix(full, dd));
  const CMatrix small = dense(product_matrix(part, dd));
  CHECK((big.topLeftCorner(part.dim(), part.dim()) - small).norm() < 1e-12);
}

TEST_CASE("equal spins: Dz only couples neighbouring blocks") {
  const CoupledBasis b(6, 6, 1000);
  const CMatrix dz = dense(b.difference(CollectiveOp::Z));
  const int top = b.block_spin(0).dim();
  CHECK(dz.block(0, 0, top, top).norm() < 1e-12);
  CHECK(dz.block(top, 0, b.block_spin(1).dim(), top).norm() > 1.0);
}
