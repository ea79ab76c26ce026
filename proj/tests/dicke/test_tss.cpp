#include "doctest.h"
#include "test_support.hpp"

#include "spinforge/core/operations.hpp"
#include "spinforge/dicke/evolution.hpp"

using namespace spinforge;

namespace {

std::vector<double> grid(double t_max, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = t_max * i / n;
  return t;
}

void check_same_moments(const EvolutionResult& a, const EvolutionResult& b, double tol) {
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CAPTURE(k);
    CHECK((a.records[k].mean - b.records[k].mean).norm() < tol);
    CHECK((a.records[k].second - b.records[k].second).cwiseAbs().maxCoeff() < tol);
    CHECK(std::abs(a.records[k].emission - b.records[k].emission) < tol);
    CHECK(std::abs(a.records[k].lab_sz - b.records[k].lab_sz) < tol);
  }
}

}  // namespace

TEST_CASE("initial TSS state") {
  const auto res = evolve_tss_unitary_truncated(40, 1.0, std::vector<double>{0.0});
  const auto& r = res.records[0];
  CHECK(r.squeezing.xi2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.block_populations[0] == doctest::Approx(1.0));
  CHECK(r.block_populations.back() == 0.0);
  CHECK(r.mean(0) == doctest::Approx(20.0));
  // lab emission of the back-to-back pair: N/4
  CHECK(r.emission == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("complete coupled basis equals the product basis in the rotated frame") {
  IntegratorOptions tight;
  tight.rtol = 1e-11;
  tight.atol = 1e-13;
  for (int n : {8, 12}) {
    TssOptions o;
    o.n_trunc = 100;
    o.integrator = tight;
    const auto t = grid(0.3, 6);
    const auto coupled = evolve_tss_unitary_truncated(n, 1.0, t, o);
    LindbladSpec spec;
    spec.hamiltonian = HamiltonianKind::TSSRotated;
    const SpinLength s = SpinLength::from_atoms(n / 2);
    const BasisDescriptor pb = ProductBasis{s, s};
    const auto product = evolve_pure(build_model(spec, pb), flat_amplitudes(initial_state(spec, pb)), t, tight);
    check_same_moments(coupled, product, 1e-8);
  }
}

TEST_CASE("lab-frame path agrees with the rotated frame") {
  IntegratorOptions tight;
  tight.rtol = 1e-11;
  tight.atol = 1e-13;
  for (int n : {8, 20}) {
    TssOptions o;
    o.n_trunc = 100;
    o.integrator = tight;
    const auto t = grid(0.25, 5);
    const auto rotated = evolve_tss_unitary_truncated(n, 1.0, t, o);
    const auto lab = evolve_tss_lab(n, 1.0, t, tight);
    check_same_moments(rotated, lab, 1e-8);
    for (std::size_t k = 0; k < t.size(); ++k)
      CHECK(lab.records[k].squeezing.xi2 == doctest::Approx(rotated.records[k].squeezing.xi2).epsilon(1e-8));
  }
}

TEST_CASE("truncation reports and converges") {
  const auto t = grid(0.12, 12);
  TssOptions o4, o6;
  o4.n_trunc = 4;
  o6.n_trunc = 6;
  const auto a = evolve_tss_unitary_truncated(100, 1.0, t, o4);
  const auto b = evolve_tss_unitary_truncated(100, 1.0, t, o6);
  CHECK(std::abs(best_squeezing(a).xi2_db - best_squeezing(b).xi2_db) < 0.2);
  TssOptions o1;
  o1.n_trunc = 1;
  const auto c = evolve_tss_unitary_truncated(100, 1.0, t, o1);
  CHECK_FALSE(c.converged);
  CHECK_FALSE(c.warnings.empty());
  CHECK_THROWS(evolve_tss_unitary_truncated(11, 1.0, t));
}

TEST_CASE("unitary TSS conserves energy and magnetization") {
  const auto res = evolve_tss_unitary_truncated(60, 1.0, grid(0.15, 10));
  for (const auto& r : res.records) {
    CHECK(r.energy == doctest::Approx(res.records[0].energy).epsilon(1e-7));
    CHECK(std::abs(r.lab_sz) < 1e-9);
    CHECK(r.trace_drift < 1e-8);
  }
}

TEST_CASE("master equation at zero rate is the unitary run") {
  const auto t = grid(0.1, 5);
  const auto u = evolve_tss_unitary_truncated(30, 1.0, t);
  const auto m = evolve_tss_master_truncated(30, 1.0, 0.0, t);
  check_same_moments(u, m, 1e-12);
}

TEST_CASE("dissipative TSS: dense master equation stays physical") {
  TssOptions o;
  o.n_trunc = 3;
  for (auto v : {TssVariant::Full, TssVariant::SyOnly}) {
    o.variant = v;
    const auto res = evolve_tss_master_truncated(16, 1.0, 0.5, grid(0.3, 6), o);
    CHECK(res.backend == "liouville");
    for (const auto& r : res.records) {
      CHECK(r.trace_drift < 1e-8);
      CHECK(r.hermiticity_error < 1e-10);
      CHECK(r.min_eigenvalue > -1e-8);
    }
  }
}

TEST_CASE("memory budget selects trajectories") {
  TssOptions o;
  o.n_trunc = 2;
  o.budget_gib = 1e-6;
  o.trajectories.n_traj = 4;
  const auto res = evolve_tss_master_truncated(16, 1.0, 0.5, grid(0.1, 2), o);
  CHECK(res.backend == "trajectories_jump");
  CHECK_FALSE(res.warnings.empty());
  CHECK(dense_liouville_bytes(985) < memory_budget_bytes(2.0));
  CHECK(dense_liouville_bytes(4985) > memory_budget_bytes(2.0));
}
