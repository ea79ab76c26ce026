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

LindbladSpec oat(double gamma) {
  LindbladSpec s;
  s.hamiltonian = HamiltonianKind::OAT;
  s.gamma = gamma;
  s.jumps = {JumpKind::CollectiveEmission};
  return s;
}

int within_sigmas(double value, double reference, double se, double sigmas) {
  return std::abs(value - reference) <= sigmas * se + 1e-12 ? 1 : 0;
}

}  // namespace

TEST_CASE("one trajectory without jumps is the unitary evolution") {
  const BasisDescriptor b = DickeBasis{SpinLength::from_atoms(12)};
  const auto spec = oat(0.0);
  const SpinModel model = build_model(spec, b);
  const CVector psi0 = flat_amplitudes(initial_state(spec, b));
  const auto t = grid(0.5, 5);
  TrajectoryOptions one;
  one.n_traj = 1;
  const auto traj = trajectory_unravel(model, psi0, t, one);
  const auto pure = evolve_pure(model, psi0, t);
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK((traj.records[k].second - pure.records[k].second).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("same seed, same output") {
  const BasisDescriptor b = DickeBasis{SpinLength::from_atoms(10)};
  const auto spec = oat(0.2);
  TrajectoryOptions o;
  o.n_traj = 16;
  o.seed = 99;
  const auto t = grid(0.3, 3);
  o.jobs = 1;
  const auto a = trajectory_unravel(spec, initial_state(spec, b), t, o);
  o.jobs = 4;
  const auto c = trajectory_unravel(spec, initial_state(spec, b), t, o);
  for (std::size_t k = 0; k < t.size(); ++k) {
    CHECK((a.records[k].second - c.records[k].second).norm() == 0.0);
    CHECK((a.records[k].mean - c.records[k].mean).norm() == 0.0);
  }
  o.seed = 100;
  const auto d = trajectory_unravel(spec, initial_state(spec, b), t, o);
  CHECK((a.records.back().second - d.records.back().second).norm() > 0.0);
}

TEST_CASE("quantum jumps reproduce the OAT master equation") {
  const int n = 20;
  const double gamma = 0.1;
  const auto t = grid(0.2, 4);
  const BasisDescriptor b = DickeBasis{SpinLength::from_atoms(n)};
  const auto spec = oat(gamma);
  TrajectoryOptions o;
  o.n_traj = 2000;
  o.seed = 7;
  const auto traj = trajectory_unravel(spec, initial_state(spec, b), t, o);
  const auto exact = evolve_oat_master(n, 1.0, gamma, t);
  int inside = 0, total = 0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    for (int a = 0; a < 3; ++a) {
      for (int c = a; c < 3; ++c) {
        inside += within_sigmas(traj.records[k].second(a, c), exact.records[k].second(a, c),
                                traj.records[k].second_se(a, c), 3.0);
        ++total;
      }
      inside += within_sigmas(traj.records[k].mean(a), exact.records[k].mean(a), traj.records[k].mean_se(a), 3.0);
      ++total;
    }
  }
  // 3-sigma bands: allow one stray correlator in 36
  CHECK(inside >= total - 1);
  CHECK(traj.records.back().emission < exact.records.front().emission);
}

TEST_CASE("phase-noise unraveling reproduces the dense master equation") {
  TssOptions dense;
  dense.n_trunc = 3;
  dense.variant = TssVariant::SyOnly;
  const auto t = grid(0.3, 3);
  const auto exact = evolve_tss_master_truncated(16, 1.0, 1.0, t, dense);

  TssOptions traj = dense;
  traj.backend = TssBackend::Trajectories;
  traj.trajectories.n_traj = 1500;
  traj.trajectories.seed = 3;
  traj.trajectories.noise_step = 0.3 / 600;
  const auto mc = evolve_tss_master_truncated(16, 1.0, 1.0, t, traj);
  CHECK(mc.backend == "trajectories_phase_noise");
  int inside = 0, total = 0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    for (int a = 0; a < 3; ++a) {
      for (int c = a; c < 3; ++c) {
        inside += within_sigmas(mc.records[k].second(a, c), exact.records[k].second(a, c),
                                mc.records[k].second_se(a, c), 3.0);
        ++total;
      }
    }
  }
  CHECK(inside >= total - 1);
}

TEST_CASE("phase noise refuses non-Hermitian jumps") {
  TssOptions o;
  o.n_trunc = 2;
  o.backend = TssBackend::Trajectories;
  o.trajectories.method = Unraveling::PhaseNoise;
  o.trajectories.n_traj = 2;
  CHECK_THROWS(evolve_tss_master_truncated(8, 1.0, 0.5, grid(0.1, 1), o));
  TrajectoryOptions bad;
  bad.n_traj = 0;
  const BasisDescriptor b = DickeBasis{SpinLength::from_atoms(4)};
  CHECK_THROWS(trajectory_unravel(oat(0.1), initial_state(oat(0.1), b), grid(0.1, 1), bad));
}
