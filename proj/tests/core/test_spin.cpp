#include "doctest.h"
#include "test_support.hpp"

#include "spinforge/core/operations.hpp"

using namespace spinforge;
using spinforge::testing::dense;

TEST_CASE("collective matrices match textbook elements") {
  for (int tw : {1, 2, 5, 10}) {
    const auto s = SpinLength::from_twice(tw);
    CHECK((dense(collective_matrix(s, CollectiveOp::Plus)) - testing::textbook_op(s.value(), '+')).norm() < 1e-14);
    CHECK((dense(collective_matrix(s, CollectiveOp::Y)) - testing::textbook_op(s.value(), 'y')).norm() < 1e-14);
    const CMatrix x = dense(collective_matrix(s, CollectiveOp::X));
    const CMatrix y = dense(collective_matrix(s, CollectiveOp::Y));
    const CMatrix z = dense(collective_matrix(s, CollectiveOp::Z));
    CHECK((x * y - y * x - kI * z).norm() < 1e-12);
    const CMatrix cas = x * x + y * y + z * z;
    CHECK((cas - dense(collective_matrix(s, CollectiveOp::Casimir))).norm() < 1e-12);
  }
}

TEST_CASE("lowering annihilates the bottom state") {
  const auto s = SpinLength::from_twice(2);
  const DickeKet bottom = DickeKet::basis_state(s, -1.0);
  CHECK(apply_collective(CollectiveOp::Minus, bottom).norm() == 0.0);
}

TEST_CASE("Casimir eigenvalue") {
  const auto s = SpinLength::from_twice(7);
  const DickeKet k = DickeKet::basis_state(s, 1.5);
  const DickeKet out = apply_collective(CollectiveOp::Casimir, k);
  CHECK((out.amps() - s.casimir() * k.amps()).norm() < 1e-14);
}

TEST_CASE("<S+S-> on an x coherent state") {
  for (int tw = 1; tw <= 20; ++tw) {
    const auto s = SpinLength::from_twice(tw);
    const double S = s.value();
    const DickeKet k = coherent_state(s, Vec3::UnitX());
    const cplx v = expectation(Ket{k}, {{CollectiveOp::Plus}, {CollectiveOp::Minus}});
    const CMatrix sp = testing::textbook_op(S, '+');
    const cplx direct = k.amps().dot(sp * sp.adjoint() * k.amps());
    const cplx identity = expectation(Ket{k}, {{CollectiveOp::Casimir}}) -
                          expectation(Ket{k}, {{CollectiveOp::Z}, {CollectiveOp::Z}}) +
                          expectation(Ket{k}, {{CollectiveOp::Z}});
    CHECK(v.real() == doctest::Approx(S * (S + 1) - S / 2).epsilon(1e-12));
    CHECK(std::abs(v - direct) < 1e-10);
    CHECK(std::abs(v - identity) < 1e-10);
  }
}

TEST_CASE("commutator expectation on random kets") {
  std::mt19937_64 rng(7);
  for (int tw : {1, 3, 6, 11}) {
    const auto s = SpinLength::from_twice(tw);
    const Ket k = DickeKet(s, testing::random_ket(s.dim(), rng));
    const cplx xy = expectation(k, {{CollectiveOp::X}, {CollectiveOp::Y}});
    const cplx yx = expectation(k, {{CollectiveOp::Y}, {CollectiveOp::X}});
    const cplx z = expectation(k, {{CollectiveOp::Z}});
    CHECK(std::abs(xy - yx - kI * z) < 1e-12);
  }
}

TEST_CASE("operator names round trip") {
  for (auto op : {CollectiveOp::Plus, CollectiveOp::Minus, CollectiveOp::X, CollectiveOp::Y, CollectiveOp::Z,
                  CollectiveOp::Casimir}) {
    CHECK(collective_op_from_string(to_string(op)) == op);
  }
  CHECK_THROWS(collective_op_from_string("Sw"));
  CHECK_THROWS(SpinLength::from_twice(-1));
}
