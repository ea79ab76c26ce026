#include <cmath>
#include <stdexcept>
#include <thread>

#include "spinforge/dicke/evolution.hpp"
#include "split.hpp"
#include "spinforge/numerics/parallel.hpp"
#include "spinforge/numerics/random.hpp"
#include "spinforge/numerics/summation.hpp"

namespace spinforge {

namespace {

constexpr int kSecondIndex[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
constexpr int kScalarFields = 3 + 6 + 3;  // mean, second, lab_sz/emission/energy

void pack(const MomentRecord& r, double* out) {
  for (int a = 0; a < 3; ++a) out[a] = r.mean(a);
  for (int k = 0; k < 6; ++k) out[3 + k] = r.second(kSecondIndex[k][0], kSecondIndex[k][1]);
  out[9] = r.lab_sz;
  out[10] = r.emission;
  out[11] = r.energy;
  for (std::size_t b = 0; b < r.block_populations.size(); ++b) out[kScalarFields + b] = r.block_populations[b];
}

bool diagonal_hermitian(const SpMat& l) {
  for (int i = 0; i < l.outerSize(); ++i) {
    for (SpMat::InnerIterator it(l, i); it; ++it) {
      if (it.row() != it.col() && it.value() != 0.0) return false;
      if (it.row() == it.col() && it.value().imag() != 0.0) return false;
    }
  }
  return true;
}

class Propagator {
 public:
  Propagator(const SpMat& h, const IntegratorOptions& opts) : split_(split_diagonal(h)), opts_(opts) {
    gen_ = (-kI * split_.diag).array();
  }

  /// psi(t_to) from psi(t_from), with an optional extra diagonal phase rate added to the generator.
  CVector advance(const CVector& from, double t_from, double t_to, const Eigen::ArrayXd* extra = nullptr) {
    if (t_to <= t_from) return from;
    Eigen::ArrayXXcd gen = gen_;
    if (extra) gen.col(0) += (-kI) * extra->cast<cplx>();
    CVector out;
    const double target[1] = {t_to};
    auto rhs = [&](double, const CMatrix& psi, CMatrix& o) { o.noalias() = (-kI) * (split_.off * psi); };
    const auto st = integrate_lawson(CMatrix(from), t_from, gen, rhs, std::span<const double>(target, 1), opts_,
                                     [&](std::size_t, double, const CMatrix& y) { out = y.col(0); });
    stats.accepted += st.accepted;
    stats.rejected += st.rejected;
    stats.rhs_evaluations += st.rhs_evaluations;
    return out;
  }

  IntegrationStats stats;

 private:
  DiagonalSplit split_;
  IntegratorOptions opts_;
  Eigen::ArrayXXcd gen_;
};

/// Waiting-time quantum jumps: evolve under H_eff until |psi|^2 drops to a uniform draw, then jump.
void run_jump_trajectory(const SpinModel& model, const SpMat& heff, const CVector& psi0,
                         std::span<const double> times, const IntegratorOptions& opts, std::mt19937_64& rng,
                         std::vector<double>& out, int fields, IntegrationStats& stats) {
  Propagator prop(heff, opts);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  CVector psi = psi0.normalized();
  double t = times.front();
  double threshold = uni(rng);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double target = times[k];
    while (t < target) {
      CVector end = prop.advance(psi, t, target);
      if (end.squaredNorm() > threshold) {
        psi = std::move(end);
        t = target;
        break;
      }
      // Illinois root search on log |psi|^2 - log r, which is close to linear in t
      const double log_r = std::log(threshold);
      double lo = t, hi = target;
      double f_lo = std::log(psi.squaredNorm()) - log_r;
      double f_hi = std::log(end.squaredNorm()) - log_r;
      CVector base = psi, at_hi = end;
      int side = 0;
      for (int it = 0; it < 60 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        double tm = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if (!(tm > lo && tm < hi)) tm = 0.5 * (lo + hi);
        CVector mid = prop.advance(base, lo, tm);
        const double fm = std::log(mid.squaredNorm()) - log_r;
        if (fm > 0.0) {
          lo = tm;
          f_lo = fm;
          base = std::move(mid);
          if (side == -1) f_hi *= 0.5;
          side = -1;
        } else {
          hi = tm;
          f_hi = fm;
          at_hi = std::move(mid);
          if (side == 1) f_lo *= 0.5;
          side = 1;
        }
        if (std::abs(fm) < 1e-10) break;
      }
      t = hi;
      std::vector<double> w(model.jumps.size());
      std::vector<CVector> jumped(model.jumps.size());
      double total = 0.0;
      for (std::size_t j = 0; j < model.jumps.size(); ++j) {
        jumped[j] = model.jumps[j] * at_hi;
        w[j] = jumped[j].squaredNorm();
        total += w[j];
      }
      if (total > 0.0) {
        double pick = uni(rng) * total;
        std::size_t j = 0;
        while (j + 1 < w.size() && pick >= w[j]) pick -= w[j++];
        psi = jumped[j] / std::sqrt(w[j]);
      } else {
        psi = at_hi.normalized();
      }
      threshold = uni(rng);
    }
    MomentRecord r = moments_of_state(model, psi);
    pack(r, out.data() + k * fields);
  }
  stats = prop.stats;
}

/// Random-unitary unraveling for Hermitian diagonal jumps l: each step of length h applies
/// exp(-i sqrt(2) l dW) with dW ~ N(0, h), which averages to -[l, [l, rho]] per jump.
void run_phase_noise_trajectory(const SpinModel& model, const std::vector<Eigen::ArrayXd>& lvec, const CVector& psi0,
                                std::span<const double> times, double step, const IntegratorOptions& opts,
                                std::mt19937_64& rng, std::vector<double>& out, int fields, IntegrationStats& stats) {
  Propagator prop(model.hamiltonian, opts);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector psi = psi0.normalized();
  double t = times.front();
  const int d = static_cast<int>(psi.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double target = times[k];
    if (target > t) {
      const int n_sub = std::max(1, static_cast<int>(std::ceil((target - t) / step - 1e-9)));
      const double h = (target - t) / n_sub;
      for (int s = 0; s < n_sub; ++s) {
        Eigen::ArrayXd rate = Eigen::ArrayXd::Zero(d);
        for (const auto& l : lvec) rate += (std::sqrt(2.0) * gauss(rng) / std::sqrt(h)) * l;
        const double t_next = (s + 1 == n_sub) ? target : t + h;
        psi = prop.advance(psi, t, t_next, &rate);
        t = t_next;
      }
    }
    MomentRecord r = moments_of_state(model, psi);
    pack(r, out.data() + k * fields);
  }
  stats = prop.stats;
}

}  // namespace

EvolutionResult trajectory_unravel(const SpinModel& model, const CVector& psi0, std::span<const double> times,
                                   const TrajectoryOptions& traj, const IntegratorOptions& opts) {
  if (traj.n_traj < 1) throw std::invalid_argument("trajectory_unravel: n_traj must be at least 1");
  if (times.empty()) throw std::invalid_argument("trajectory_unravel: empty time grid");
  validate_time_grid(times, times.front());
  const int d = basis_dim(model.basis);
  if (psi0.size() != d) throw std::invalid_argument("trajectory_unravel: psi0 has the wrong length");

  bool all_diagonal = true;
  for (const SpMat& l : model.jumps) all_diagonal = all_diagonal && diagonal_hermitian(l);
  Unraveling method = traj.method;
  if (method == Unraveling::Auto) method = (all_diagonal && !model.jumps.empty()) ? Unraveling::PhaseNoise : Unraveling::Jump;
  if (method == Unraveling::PhaseNoise && !all_diagonal) {
    throw std::invalid_argument("phase-noise unraveling needs Hermitian jump operators diagonal in the basis");
  }

  const SpMat heff = effective_hamiltonian(model);
  std::vector<Eigen::ArrayXd> lvec;
  for (const SpMat& l : model.jumps) lvec.push_back(Eigen::VectorXd(l.diagonal().real()).array());
  const double span_t = times.back() - times.front();
  const double step = traj.noise_step > 0.0 ? traj.noise_step : (span_t > 0.0 ? span_t / 400.0 : 1.0);

  const int n_blocks = static_cast<int>(moments_of_state(model, psi0).block_populations.size());
  const int fields = kScalarFields + n_blocks;
  const std::size_t n = static_cast<std::size_t>(traj.n_traj);
  std::vector<std::vector<double>> buffers(n);
  std::vector<IntegrationStats> stats(n);
  const int jobs = traj.jobs > 0 ? traj.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  parallel_for(n, jobs, [&](std::size_t i) {
    auto rng = make_stream(traj.seed, i);
    buffers[i].assign(times.size() * fields, 0.0);
    if (method == Unraveling::PhaseNoise) {
      run_phase_noise_trajectory(model, lvec, psi0, times, step, opts, rng, buffers[i], fields, stats[i]);
    } else {
      run_jump_trajectory(model, heff, psi0, times, opts, rng, buffers[i], fields, stats[i]);
    }
  });

  EvolutionResult res;
  res.backend = method == Unraveling::PhaseNoise ? "trajectories_phase_noise" : "trajectories_jump";
  res.axes = model.axes;
  res.atoms = model.atoms;
  res.records.resize(times.size());
  std::vector<double> column(n), dev(n);
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> mean(fields), se(fields);
    for (int f = 0; f < fields; ++f) {
      for (std::size_t i = 0; i < n; ++i) column[i] = buffers[i][k * fields + f];
      mean[f] = pairwise_sum(std::span<const double>(column)) / static_cast<double>(n);
      if (n > 1) {
        for (std::size_t i = 0; i < n; ++i) dev[i] = (column[i] - mean[f]) * (column[i] - mean[f]);
        se[f] = std::sqrt(pairwise_sum(std::span<const double>(dev)) / static_cast<double>(n - 1) / static_cast<double>(n));
      }
    }
    MomentRecord& r = res.records[k];
    r.t = times[k];
    for (int a = 0; a < 3; ++a) {
      r.mean(a) = mean[a];
      r.mean_se(a) = se[a];
    }
    for (int q = 0; q < 6; ++q) {
      const int i = kSecondIndex[q][0], j = kSecondIndex[q][1];
      r.second(i, j) = r.second(j, i) = mean[3 + q];
      r.second_se(i, j) = r.second_se(j, i) = se[3 + q];
    }
    r.lab_sz = mean[9];
    r.emission = mean[10];
    r.energy = mean[11];
    r.block_populations.assign(mean.begin() + kScalarFields, mean.end());
  }
  for (const auto& s : stats) {
    res.stats.accepted += s.accepted;
    res.stats.rejected += s.rejected;
    res.stats.rhs_evaluations += s.rhs_evaluations;
  }
  res.metadata["n_traj"] = traj.n_traj;
  res.metadata["seed"] = traj.seed;
  if (method == Unraveling::PhaseNoise) res.metadata["noise_step"] = step;
  attach_squeezing(res);
  return res;
}

EvolutionResult trajectory_unravel(const LindbladSpec& spec, const Ket& psi0, std::span<const double> times,
                                   const TrajectoryOptions& traj, const IntegratorOptions& opts) {
  const SpinModel model = build_model(spec, basis_of(psi0));
  return trajectory_unravel(model, flat_amplitudes(psi0), times, traj, opts);
}

}  // namespace spinforge
