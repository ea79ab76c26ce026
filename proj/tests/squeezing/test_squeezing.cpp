#include "doctest.h"
#include "test_support.hpp"

#include "spinforge/core/operations.hpp"
#include "spinforge/squeezing/squeezing.hpp"

using namespace spinforge;

namespace {

// Dense one-axis twisting state exp(-i mu Sz^2 / 2) |+x>, the standard squeezed test state.
DickeKet twisted(int twice_s, double mu) {
  const auto s = SpinLength::from_twice(twice_s);
  DickeKet k = coherent_state(s, Vec3::UnitX());
  CVector a = k.amps();
  for (int i = 0; i < s.dim(); ++i) {
    const double m = s.m_at(i);
    a(i) *= std::exp(cplx(0.0, -0.5 * mu * m * m));
  }
  return DickeKet(s, a);
}

}  // namespace

TEST_CASE("coherent state is at the standard quantum limit") {
  for (int tw : {4, 20, 101}) {
    const Ket k = coherent_state(SpinLength::from_twice(tw), Vec3::UnitX());
    const SpinMoments m = total_spin_moments(k);
    const auto r = squeezing_report(correlators_from_moments(m.mean, m.second), tw);
    CHECK(r.xi2 == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(r.xi2_nominal == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(std::abs(r.xi2_db) < 1e-9);
  }
}

TEST_CASE("minimum quadrature agrees with a brute-force angle scan") {
  for (double mu : {0.05, 0.2, 0.6}) {
    const int tw = 40;
    const DickeKet k = twisted(tw, mu);
    const SpinMoments m = total_spin_moments(Ket{k});
    const auto c = correlators_from_moments(m.mean, m.second);
    const auto v = variances_from_correlators(c);

    // Independent route: explicit operator cos(psi) Sy - sin(psi) Sz on the state vector.
    const auto s = k.spin();
    const CMatrix sy = testing::textbook_op(s.value(), 'y');
    const CMatrix sz = testing::textbook_op(s.value(), 'z');
    double best = 1e300, best_psi = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      const double psi = kPi * i / 20000.0;
      const CMatrix q = std::cos(psi) * sy - std::sin(psi) * sz;
      const double mean = k.amps().dot(q * k.amps()).real();
      const double var = k.amps().dot(q * q * k.amps()).real() - mean * mean;
      if (var < best) {
        best = var;
        best_psi = psi;
      }
    }
    CAPTURE(mu);
    CHECK(v.v_minus == doctest::Approx(best).epsilon(1e-6));
    const double psi_min = 0.5 * kPi - v.nu;
    const double wrapped = std::remainder(psi_min - best_psi, kPi);
    CHECK(std::abs(wrapped) < 2e-3);
    CHECK(quadrature_variance(c, psi_min) == doctest::Approx(v.v_minus).epsilon(1e-12));
    CHECK(quadrature_variance(c, -v.nu) == doctest::Approx(v.v_plus).epsilon(1e-12));
    CHECK(v.v_minus < s.value() / 2);
  }
}

TEST_CASE("Wineland and nominal normalizations") {
  const DickeKet k = twisted(60, 0.3);
  const SpinMoments m = total_spin_moments(Ket{k});
  const auto r = squeezing_report(correlators_from_moments(m.mean, m.second), 60);
  CHECK(r.xi2 == doctest::Approx(60 * r.v_minus / (r.spin_length * r.spin_length)));
  CHECK(r.xi2_nominal == doctest::Approx(r.v_minus / 15.0));
  CHECK(r.xi2 > r.xi2_nominal);
  CHECK(to_db(0.5) == doctest::Approx(-3.0103).epsilon(1e-4));
}

TEST_CASE("isotropic noise has nu = 0") {
  QuadratureCorrelators c;
  c.C = 2.0;
  const auto v = variances_from_correlators(c);
  CHECK(v.nu == 0.0);
  CHECK(v.v_minus == v.v_plus);
  CHECK_THROWS(squeezing_parameter(1.0, 0.0, 10.0));
}

TEST_CASE("mean along z picks the x axis as reference") {
  Mat3 second = Mat3::Zero();
  second(0, 0) = 1.0;
  second(1, 1) = 3.0;
  second(2, 2) = 16.0;
  const auto c = correlators_from_moments(Vec3(0, 0, 4), second);
  CHECK(c.C == doctest::Approx(4.0));
  CHECK(std::abs(c.A) == doctest::Approx(2.0));
}

TEST_CASE("measurement frame: moment map equals state rotation") {
  std::mt19937_64 rng(21);
  const auto s1 = SpinLength::from_twice(4);
  const auto s2 = SpinLength::from_twice(4);
  const auto lab = TwoEnsembleKet::from_flat(s1, s2, testing::random_ket(s1.dim() * s2.dim(), rng));
  const SpinMoments by_moments = tss_frame_map(two_ensemble_moments(lab));
  const SpinMoments by_state = total_spin_moments(Ket{tss_frame_map(lab)});
  CHECK((by_moments.mean - by_state.mean).norm() < 1e-11);
  CHECK((by_moments.second - by_state.second).norm() < 1e-10);
}

TEST_CASE("cavity field estimate") {
  const auto f = cavity_field_estimate(cplx(2.0, 0.0), 5.0, 0.5, 2.0, 0.0);
  CHECK(std::abs(f.amplitude - cplx(0.0, -1.0)) < 1e-14);
  CHECK(f.photons == doctest::Approx(1.25));
  CHECK_THROWS(cavity_field_estimate(cplx(1.0), 1.0, 1.0, 0.0, 0.0));

  const Ket k = coherent_state(SpinLength::from_twice(10), Vec3::UnitX());
  const auto g = cavity_field_estimate(k, 1.0, 0.0, 10.0);
  CHECK(g.amplitude.real() == doctest::Approx(0.5));
  CHECK(g.photons == doctest::Approx(0.01 * (30.0 - 2.5)));
}
