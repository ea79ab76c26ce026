#include "doctest.h"
#include "test_support.hpp"

#include <cmath>

#include "spinforge/analytic/optimum.hpp"
#include "spinforge/numerics/minimize.hpp"
#include "spinforge/squeezing/squeezing.hpp"

using namespace spinforge;

namespace {

// exp(-i tau Sz^2)|+x>, moments by brute force.
OatCorrelators dense_twist(double S, double tau) {
  const CMatrix sy = testing::textbook_op(S, 'y'), sz = testing::textbook_op(S, 'z');
  const CMatrix up = testing::expm_hermitian(sy, kPi / 2);
  CVector top = CVector::Zero(sz.rows());
  top(top.size() - 1) = 1.0;
  CVector psi = up * top;
  for (int i = 0; i < psi.size(); ++i) psi(i) *= std::exp(cplx(0.0, -tau * std::norm(sz(i, i))));
  auto ev = [&](const CMatrix& op) { return psi.dot(op * psi).real(); };
  const double my = ev(sy), mz = ev(sz);
  return {ev(sy * sy) - my * my, ev(sz * sz) - mz * mz, ev(sy * sz + sz * sy) - 2.0 * my * mz};
}

double brute_min(const std::function<double(double)>& f, double lo, double hi, int n) {
  double best = HUGE_VAL;
  for (int i = 0; i <= n; ++i) best = std::min(best, f(lo + (hi - lo) * i / n));
  return best;
}

}  // namespace

TEST_CASE("cavity rates") {
  const auto r = cavity_rates(1.0, 2.0, 1.0);
  CHECK(r.chi == doctest::Approx(0.5));
  CHECK(r.gamma == doctest::Approx(1.0));
  CHECK(r.gamma / r.chi == doctest::Approx(r.kappa / r.detuning));

  const auto far = cavity_rates(1.0, 2.0, 1e4);
  const auto approx = far_detuned_rates(1.0, 2.0, 1e4);
  CHECK(far.chi == doctest::Approx(approx.chi).epsilon(1e-7));
  CHECK(far.gamma == doctest::Approx(approx.gamma).epsilon(1e-7));

  const auto resonant = cavity_rates(1.0, 2.0, 0.0);
  CHECK(resonant.chi == 0.0);
  CHECK(resonant.gamma == doctest::Approx(2.0));
  CHECK_THROWS_AS(cavity_rates(1.0, 0.0, 0.0), std::invalid_argument);
  CHECK(cooperativity(1.0, 2.0, 0.5) == doctest::Approx(4.0));
}

TEST_CASE("exact OAT correlators against dense propagation") {
  const auto zero = oat_exact_correlators(5.0, 0.0);
  CHECK(zero.var_sy == doctest::Approx(2.5));
  CHECK(zero.var_sz == doctest::Approx(2.5));
  CHECK(zero.cross_yz == doctest::Approx(0.0));

  const auto s2 = oat_exact_correlators(2.0, 0.1);
  CHECK(s2.cross_yz == doctest::Approx(6.0 * std::sin(0.1) * std::pow(std::cos(0.1), 2)).epsilon(1e-14));
  const auto d2 = dense_twist(2.0, 0.1);
  CHECK(s2.cross_yz == doctest::Approx(d2.cross_yz).epsilon(1e-12));

  for (double S : {0.5, 1.0, 3.5, 10.0, 40.0}) {
    for (double tau : {0.01, 0.1, 0.4, 1.0}) {
      const auto a = oat_exact_correlators(S, tau);
      const auto d = dense_twist(S, tau);
      const double scale = S * S;
      CAPTURE(S);
      CAPTURE(tau);
      CHECK(std::abs(a.var_sy - d.var_sy) < 1e-10 * scale);
      CHECK(std::abs(a.var_sz - d.var_sz) < 1e-10 * scale);
      CHECK(std::abs(a.cross_yz - d.cross_yz) < 1e-10 * scale);
      CHECK(a.var_sz == S / 2);
    }
  }
}

TEST_CASE("collective emission variance") {
  CHECK(collective_emission_variance(100, 0.01, 0.0) == 0.0);
  const double n = 1000, g = 1e-6, t = 1.0;
  CHECK(collective_emission_variance(n, g, t) == doctest::Approx(n * n * g * t / 4).epsilon(1e-3));
  CHECK(collective_emission_variance(n, 1.0, 100.0) < 1e-10);
  CHECK_THROWS(collective_emission_variance(n, 1.0, -1.0));
}

TEST_CASE("perturbative model terms") {
  const double n = 1000, t = 0.01;
  const double beta = 0.5 * n * t * t;
  const auto ideal = xi2_model(Protocol::OAT, {}, n, 1.0, 0.0, t);
  CHECK(ideal.beta == doctest::Approx(beta));
  CHECK(ideal.total() == doctest::Approx(1 / (2 * n * beta) + 2.0 / 3 * beta * beta).epsilon(1e-14));

  const auto noisy = xi2_model(Protocol::OAT, {0.05, 0, 0}, n, 1.0, 0.0, t);
  CHECK(noisy.total() - ideal.total() == doctest::Approx(0.05 * n * t).epsilon(1e-12));
  CHECK(noisy.term("collective") == 0.05 * n * t);

  const auto tss = xi2_model(Protocol::TSS, {0.05, 0, 0}, n, 1.0, 0.0, t);
  CHECK(tss.term("collective") == doctest::Approx(0.05 * n * t / (2 * n * beta)));
  CHECK(tss.term("curvature") == doctest::Approx(14.0 / 9 * beta * beta));
  ModelOptions bare;
  bare.tss_curvature = TssCurvature::Bare;
  CHECK(xi2_model(Protocol::TSS, {}, n, 1.0, 0.0, t, bare).term("curvature") ==
        doctest::Approx(2.0 / 3 * beta * beta));

  SUBCASE("TSS at the ideal optimum, Gamma = 0.1 chi, N = 1000") {
    const double b = std::cbrt(9.0 / (56.0 * n));
    const double topt = std::sqrt(2 * b / n);
    const auto p = xi2_model(Protocol::TSS, {0.1, 0, 0}, n, 1.0, 0.0, topt);
    CHECK(p.term("shear") + p.term("curvature") == doctest::Approx(0.0138).epsilon(2e-3));
    CHECK(p.term("collective") == doctest::Approx(0.00959).epsilon(2e-3));
    CHECK(to_db(p.total()) == doctest::Approx(-16.3).epsilon(3e-3));
  }

  SUBCASE("single-particle channels") {
    const auto oat_s = xi2_model(Protocol::OAT, {0.01, 0.2, 0}, n, 1.0, 0.0, t);
    CHECK(oat_s.term("single_particle") == doctest::Approx(2 * 0.2 * t));
    CHECK(oat_s.term("curvature") == 0.0);
    ModelOptions single;
    single.oat_emission = EmissionWeight::Single;
    CHECK(xi2_model(Protocol::OAT, {0.01, 0.2, 0}, n, 1.0, 0.0, t, single).term("single_particle") ==
          doctest::Approx(0.2 * t));
    CHECK(xi2_model(Protocol::TSS, {0.01, 0.2, 0}, n, 1.0, 0.0, t).term("single_particle") ==
          doctest::Approx(0.2 * t));

    const double x = 0.3 * t;
    const auto oat_el = xi2_model(Protocol::OAT, {0.01, 0, 0.3}, n, 1.0, 0.0, t);
    CHECK(oat_el.total() == doctest::Approx(std::exp(2 * x) / (2 * n * beta) + std::exp(x) * 0.01 * n * t));
    ModelOptions expanded;
    expanded.expand_dephasing = true;
    CHECK(xi2_model(Protocol::OAT, {0.01, 0, 0.3}, n, 1.0, 0.0, t, expanded).total() ==
          doctest::Approx((1 + 2 * x) / (2 * n * beta) + 0.01 * n * t));
    CHECK_THROWS_AS(xi2_model(Protocol::OAT, {0, 0.1, 0.1}, n, 1.0, 0.0, t), std::invalid_argument);
  }

  SUBCASE("number fluctuations") {
    const auto plain = xi2_model(Protocol::TSS, {}, n, 1.0, 0.0, t);
    const auto fl = xi2_model(Protocol::TSS, {}, n, 1.0, 3.0, t);
    CHECK(fl.total() - plain.total() == doctest::Approx(16 * 9.0 * beta / n));
    CHECK_THROWS(xi2_model(Protocol::OAT, {}, n, 1.0, 3.0, t));
  }

  SUBCASE("validity flags") {
    CHECK(ideal.validity.all());
    CHECK_FALSE(xi2_model(Protocol::OAT, {}, n, 1.0, 0.0, 0.1).validity.beta_small);
    CHECK_FALSE(xi2_model(Protocol::OAT, {0.05, 0, 0}, n, 1.0, 0.0, t).validity.collective_small);
  }
}

TEST_CASE("model output is invariant under a common rescaling of rates and time") {
  const double g = 3.0, kappa = 5.0, det = 40.0, gamma = 0.02, t = 0.07, n = 500;
  for (double lam : {0.01, 7.0}) {
    for (Protocol p : {Protocol::OAT, Protocol::TSS}) {
      const auto r0 = cavity_rates(g, kappa, det);
      const auto r1 = cavity_rates(lam * g, lam * kappa, lam * det);
      for (int ch = 0; ch < 2; ++ch) {
        const DecoherenceChannels c0{r0.gamma, ch == 0 ? gamma : 0.0, ch == 1 ? gamma : 0.0};
        const DecoherenceChannels c1{r1.gamma, ch == 0 ? lam * gamma : 0.0, ch == 1 ? lam * gamma : 0.0};
        CHECK(xi2_model(p, c0, n, r0.chi, 0.0, t).total() ==
              doctest::Approx(xi2_model(p, c1, n, r1.chi, 0.0, t / lam).total()).epsilon(1e-12));
      }
      const auto a = optimum_over_detuning(p, SingleParticleChannel::Emission, n, g, kappa, gamma);
      const auto b = optimum_over_detuning(p, SingleParticleChannel::Emission, n, lam * g, lam * kappa, lam * gamma);
      CHECK(a.closed_form.xi2_opt == doctest::Approx(b.closed_form.xi2_opt).epsilon(1e-12));
      CHECK(a.numeric.xi2_opt == doctest::Approx(b.numeric.xi2_opt).epsilon(1e-8));
      CHECK(b.closed_form.t_opt * lam == doctest::Approx(a.closed_form.t_opt).epsilon(1e-12));
    }
  }
}

TEST_CASE("fixed-ratio optima") {
  for (double n : {100.0, 1000.0, 1e5}) {
    const auto r = optimum_fixed_ratio(Protocol::OAT, n, 0.1);
    CHECK(r.closed_form.xi2_opt == doctest::Approx(3 / std::cbrt(4.0) * std::cbrt(0.01)).epsilon(1e-14));
    CHECK(r.closed_form.xi2_opt == doctest::Approx(0.407).epsilon(2e-3));
    CHECK(r.closed_form.xi2_db() == doctest::Approx(-3.9).epsilon(0.02));
    CHECK(r.confirmed());
    CHECK(r.numeric.t_opt == doctest::Approx(std::cbrt(2.0 / (n * n * n * 0.1))).epsilon(1e-6));
    REQUIRE(r.discrepancies.size() == 1);
    CHECK(r.discrepancies[0].stated == doctest::Approx(2 / std::cbrt(9.0) * std::cbrt(0.01)));
  }

  const auto ideal = optimum_fixed_ratio(Protocol::OAT, 1000, 0.0);
  CHECK(ideal.closed_form.xi2_opt == doctest::Approx(std::cbrt(9.0 / 8) * std::pow(1000.0, -2.0 / 3)));
  CHECK(ideal.confirmed());
  CHECK(ideal.discrepancies.empty());

  const auto tss_ideal = optimum_fixed_ratio(Protocol::TSS, 1000, 0.0);
  CHECK(tss_ideal.confirmed());
  CHECK(tss_ideal.closed_form.xi2_opt == doctest::Approx(std::cbrt(21.0) / (2 * 100)));

  const auto tss = optimum_fixed_ratio(Protocol::TSS, 1000, 0.1);
  const double eq = std::cbrt(21.0) / (2 * 100) + std::pow(7.0, 1.0 / 6) * 0.1 / (std::cbrt(3.0) * 10);
  CHECK(tss.closed_form.xi2_opt == doctest::Approx(eq).epsilon(1e-14));
  auto model = [](double lt) { return xi2_model(Protocol::TSS, {0.1, 0, 0}, 1000, 1.0, 0.0, std::exp(lt)).total(); };
  CHECK(tss.numeric.xi2_opt == doctest::Approx(brute_min(model, std::log(1e-3), std::log(1.0), 200000)).epsilon(1e-9));
  CHECK(to_db(tss.closed_form.xi2_opt) == doctest::Approx(-16.3).epsilon(0.1 / 16.3));
  CHECK(to_db(tss.numeric.xi2_opt) == doctest::Approx(-16.3).epsilon(0.1 / 16.3));
  CHECK_FALSE(tss.confirmed());
  CHECK_FALSE(tss.discrepancies.empty());
}

TEST_CASE("detuning-optimized bounds") {
  const double kappa = 2 * kPi * 145e3, eta = 0.41, gamma0 = 2 * kPi * 1e-3, n = 1e5;
  const double g = std::sqrt(eta * kappa * gamma0 / 4);

  SUBCASE("OAT with emission matches its own model") {
    const auto r = optimum_over_detuning(Protocol::OAT, SingleParticleChannel::Emission, n, g, kappa, gamma0);
    const double neta = n * eta;
    CHECK(r.closed_form.xi2_opt == doctest::Approx(6 / std::cbrt(neta)));
    CHECK(r.closed_form.t_opt == doctest::Approx(1 / (std::cbrt(neta) * gamma0)));
    CHECK(r.closed_form.detuning_opt == doctest::Approx(kappa / 2 * std::sqrt(neta / 2)));
    CHECK(r.confirmed());
    CHECK(r.discrepancies.empty());
    CHECK(to_db(r.closed_form.xi2_opt) == doctest::Approx(-7.6).epsilon(0.1 / 7.6));

    ModelOptions single;
    single.oat_emission = EmissionWeight::Single;
    const auto s = optimum_over_detuning(Protocol::OAT, SingleParticleChannel::Emission, n, g, kappa, gamma0, single);
    CHECK(s.confirmed());
    CHECK(s.discrepancies.empty());
  }

  SUBCASE("state-of-the-art rates") {
    const double gs = 2 * kPi * 0.1;
    CHECK(cooperativity(g, kappa, gs) == doctest::Approx(0.0041));
    const auto tss = optimum_over_detuning(Protocol::TSS, SingleParticleChannel::Emission, n, g, kappa, gs);
    const auto oat = optimum_over_detuning(Protocol::OAT, SingleParticleChannel::Emission, n, g, kappa, gs);
    CHECK(tss.closed_form.xi2_opt == doctest::Approx(std::sqrt(24 / 410.0)));
    CHECK(tss.closed_form.xi2_db() == doctest::Approx(-6.2).epsilon(0.1 / 6.2));
    CHECK(oat.closed_form.xi2_opt == doctest::Approx(6 / std::cbrt(410.0)));
    CHECK(oat.closed_form.xi2_db() == doctest::Approx(-0.9).epsilon(0.1 / 0.9));
    const auto el = optimum_over_detuning(Protocol::TSS, SingleParticleChannel::Dephasing, n, g, kappa, gs);
    CHECK(el.closed_form.xi2_opt == tss.closed_form.xi2_opt);
    CHECK(el.closed_form.t_opt == tss.closed_form.t_opt);
  }

  SUBCASE("TSS closed form is not a minimum of its own far-detuned model") {
    const auto r = optimum_over_detuning(Protocol::TSS, SingleParticleChannel::Emission, n, g, kappa, gamma0);
    CHECK(r.closed_form.xi2_db() == doctest::Approx(-16.2).epsilon(0.1 / 16.2));
    CHECK_FALSE(r.confirmed());
    CHECK(r.numeric_on_boundary);
    // collective term is detuning independent here; the shear term vanishes as the detuning drops
    CHECK(r.numeric.xi2_opt == doctest::Approx(std::sqrt(16 / (n * eta))).epsilon(1e-6));
  }

  SUBCASE("OAT dephasing") {
    const auto r = optimum_over_detuning(Protocol::OAT, SingleParticleChannel::Dephasing, n, g, kappa, gamma0);
    CHECK(r.closed_form.xi2_opt == doctest::Approx(std::sqrt(110 / (n * eta))).epsilon(5e-3));
    CHECK(r.numeric.xi2_opt == doctest::Approx(std::sqrt(48 * std::exp(1.0) / (n * eta))).epsilon(1e-8));
    CHECK(r.numeric.t_opt * gamma0 == doctest::Approx(1.0 / 3).epsilon(1e-5));
    CHECK_FALSE(r.confirmed());
  }
}

TEST_CASE("number-fluctuation bound") {
  const double n = 1e4;
  const auto b = number_fluctuation_bound(n, 100 / std::sqrt(2.0));
  CHECK(b.xi2_bound == doctest::Approx(0.01));
  CHECK(to_db(b.xi2_bound) == doctest::Approx(-20.0));
  CHECK(to_db(b.ideal_xi2) == doctest::Approx(-25.3).epsilon(0.1 / 25.3));
  CHECK(b.regime == FluctuationRegime::FluctuationLimited);

  const auto zero = number_fluctuation_bound(n, 0.0);
  CHECK(zero.xi2_bound == 0.0);
  CHECK(zero.regime == FluctuationRegime::IdealLimited);
  CHECK(number_fluctuation_bound(n, std::cbrt(n)).regime == FluctuationRegime::Crossover);
  CHECK_THROWS(number_fluctuation_bound(n, -1.0));
}

TEST_CASE("minimizers") {
  const auto m = golden_section([](double x) { return (x - 0.3) * (x - 0.3) + 1; }, -2, 5);
  CHECK(m.x == doctest::Approx(0.3).epsilon(1e-7));
  const auto s = scan_and_refine([](double x) { return std::cos(x); }, 0, 6, 30);
  CHECK(s.x == doctest::Approx(kPi).epsilon(1e-7));

  auto rosen = [](std::span<const double> p) {
    return 100 * std::pow(p[1] - p[0] * p[0], 2) + std::pow(1 - p[0], 2);
  };
  const auto r = nelder_mead(rosen, {-1.2, 1.0});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-7));
}
