#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mean_field.hpp"
#include "spinforge/numerics/parallel.hpp"
#include "spinforge/numerics/summation.hpp"

namespace spinforge {

namespace {

/// Streaming mean and co-moment (Welford), merged with the pairwise update of Chan et al.
struct Accumulator {
  double n = 0.0;
  Vec3 mean = Vec3::Zero();
  Mat3 comoment = Mat3::Zero();
  Vec3 extra = Vec3::Zero();  ///< means of lab Sz, emission symbol, energy

  void add(const Vec3& x, const Vec3& e) {
    n += 1.0;
    const Vec3 d = x - mean;
    mean += d / n;
    comoment += d * (x - mean).transpose();
    extra += (e - extra) / n;
  }
};

Accumulator operator+(const Accumulator& a, const Accumulator& b) {
  if (a.n == 0.0) return b;
  if (b.n == 0.0) return a;
  Accumulator r;
  r.n = a.n + b.n;
  const Vec3 d = b.mean - a.mean;
  r.mean = a.mean + d * (b.n / r.n);
  r.comoment = a.comoment + b.comoment + d * d.transpose() * (a.n * b.n / r.n);
  r.extra = a.extra + (b.extra - a.extra) * (b.n / r.n);
  return r;
}

struct Frame {
  Protocol protocol;
  bool sy_only;
  double chi;

  Vec3 measured(const BlochPoint& p) const {
    if (protocol == Protocol::OAT) return {p[0], p[1], p[2]};
    return {p[0] - p[3], p[1] + p[4], p[2] - p[5]};
  }
  Vec3 extras(const BlochPoint& p) const {
    const double x = p[0] + p[3], y = p[1] + p[4], z = p[2] + p[5];
    const double energy = chi * (sy_only ? y * y : x * x + y * y);
    return {z, x * x + y * y + z, energy};
  }
};

struct Reduction {
  double atoms;
  AxisPair axes;
  bool enforce;

  void moments(const Accumulator& a, Vec3& mean, Mat3& second) const {
    Mat3 cov = a.comoment / (a.n - 1.0);
    if (enforce) cov(1, 1) = 0.25 * atoms;
    mean = a.mean;
    second = cov + mean * mean.transpose();
  }
  double xi2(const Accumulator& a) const {
    Vec3 mean;
    Mat3 second;
    moments(a, mean, second);
    if (mean.norm() == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return squeezing_report(correlators_from_moments(mean, second, axes), atoms).xi2;
  }
};

std::size_t block_count(std::size_t n_traj, int requested) {
  const std::size_t cap = std::max<std::size_t>(2, n_traj / 2);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(2, requested)), 2, cap);
}

std::size_t block_begin(std::size_t b, std::size_t n_traj, std::size_t n_blocks) { return b * n_traj / n_blocks; }

MomentRecord reduce(std::span<const Accumulator> blocks, const Reduction& red) {
  MomentRecord r;
  const Accumulator total = pairwise_sum(blocks);
  red.moments(total, r.mean, r.second);
  r.lab_sz = total.extra(0);
  r.emission = total.extra(1);
  r.energy = total.extra(2);

  // delete-one-block jackknife
  const std::size_t nb = blocks.size();
  std::vector<Accumulator> prefix(nb + 1), suffix(nb + 1);
  for (std::size_t b = 0; b < nb; ++b) prefix[b + 1] = prefix[b] + blocks[b];
  for (std::size_t b = nb; b-- > 0;) suffix[b] = blocks[b] + suffix[b + 1];
  std::vector<Vec3> means(nb);
  std::vector<Mat3> seconds(nb);
  std::vector<double> xis(nb);
  Vec3 mean_bar = Vec3::Zero();
  Mat3 second_bar = Mat3::Zero();
  double xi_bar = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    const Accumulator loo = prefix[b] + suffix[b + 1];
    red.moments(loo, means[b], seconds[b]);
    xis[b] = red.xi2(loo);
    mean_bar += means[b];
    second_bar += seconds[b];
    xi_bar += xis[b];
  }
  mean_bar /= static_cast<double>(nb);
  second_bar /= static_cast<double>(nb);
  xi_bar /= static_cast<double>(nb);
  Vec3 mean_var = Vec3::Zero();
  Mat3 second_var = Mat3::Zero();
  double xi_var = 0.0;
  for (std::size_t b = 0; b < nb; ++b) {
    mean_var += (means[b] - mean_bar).cwiseAbs2();
    second_var += (seconds[b] - second_bar).cwiseAbs2();
    xi_var += (xis[b] - xi_bar) * (xis[b] - xi_bar);
  }
  const double f = static_cast<double>(nb - 1) / static_cast<double>(nb);
  r.mean_se = (f * mean_var).cwiseSqrt();
  r.second_se = (f * second_var).cwiseSqrt();
  r.xi2_se = std::sqrt(f * xi_var);
  return r;
}

EvolutionResult finish(std::vector<std::vector<Accumulator>>& acc, std::span<const double> times, Protocol protocol,
                       double atoms, const MeanFieldParams& params, const CorrelatorOptions& opts) {
  EvolutionResult res;
  res.backend = "twa";
  res.axes = protocol == Protocol::TSS ? AxisPair::SyDeltaZ : AxisPair::SySz;
  res.atoms = atoms;
  const bool enforce = opts.enforce_sy_variance && params.gamma_s > 0.0;
  const Reduction red{atoms, res.axes, enforce};
  res.records.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    res.records[k] = reduce(acc[k], red);
    res.records[k].t = times[k];
  }
  attach_squeezing(res);
  res.warnings = validity_warnings(params, times);
  res.metadata["protocol"] = std::string(to_string(protocol));
  res.metadata["chi"] = params.chi;
  res.metadata["gamma_s"] = params.gamma_s;
  res.metadata["gamma_el"] = params.gamma_el;
  res.metadata["frozen_sy"] = params.frozen_sy;
  res.metadata["shear"] = twa_detail::shear_sy_only(protocol, params) ? "chi Sy^2" : "chi S+S-";
  res.metadata["sy_variance_enforced"] = enforce;
  res.metadata["jackknife_blocks"] = acc.empty() ? 0 : acc.front().size();
  return res;
}

}  // namespace

EvolutionResult batch_correlators(std::span<const TrajectoryBatch> series, const MeanFieldParams& params,
                                  const CorrelatorOptions& opts) {
  if (series.empty()) throw std::invalid_argument("batch_correlators: empty series");
  const std::size_t n = series.front().size();
  if (n < 2) throw std::invalid_argument("batch_correlators: need at least two trajectories");
  const Protocol protocol = series.front().protocol;
  const Frame frame{protocol, twa_detail::shear_sy_only(protocol, params), params.chi};
  const std::size_t nb = block_count(n, opts.blocks);
  std::vector<std::vector<Accumulator>> acc(series.size(), std::vector<Accumulator>(nb));
  std::vector<double> times;
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k].size() != n) throw std::invalid_argument("batch_correlators: ragged series");
    times.push_back(series[k].t);
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t i = block_begin(b, n, nb); i < block_begin(b + 1, n, nb); ++i) {
        acc[k][b].add(frame.measured(series[k].points[i]), frame.extras(series[k].points[i]));
      }
    }
  }
  EvolutionResult res = finish(acc, times, protocol, series.front().atoms, params, opts);
  res.metadata["n_traj"] = n;
  return res;
}

EvolutionResult run_twa(const WignerSamplingSpec& spec, const MeanFieldParams& params, std::span<const double> times,
                        const TwaIntegratorOptions& integrator, const CorrelatorOptions& correlators) {
  if (times.empty()) throw std::invalid_argument("run_twa: empty time grid");
  const TrajectoryBatch initial = sample_initial(spec);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < 0.0 || (k > 0 && times[k] < times[k - 1])) {
      throw std::invalid_argument("run_twa: times must be non-negative and ascending");
    }
  }
  const Frame frame{spec.protocol, twa_detail::shear_sy_only(spec.protocol, params), params.chi};
  const std::size_t n = initial.size();
  const std::size_t nb = block_count(n, correlators.blocks);
  std::vector<std::vector<Accumulator>> acc(times.size(), std::vector<Accumulator>(nb));
  parallel_for(nb, twa_detail::resolve_jobs(integrator.jobs), [&](std::size_t b) {
    for (std::size_t i = block_begin(b, n, nb); i < block_begin(b + 1, n, nb); ++i) {
      twa_detail::evolve_one(initial.points[i], initial.sizes_of(i), spec.protocol, spec.atoms, params, times,
                             integrator, [&](std::size_t k, const BlochPoint& p) {
                               acc[k][b].add(frame.measured(p), frame.extras(p));
                             });
    }
  });
  EvolutionResult res = finish(acc, times, spec.protocol, spec.atoms, params, correlators);
  res.metadata["n_traj"] = n;
  res.metadata["seed"] = spec.seed;
  res.metadata["sigma_n"] = spec.sigma_n;
  res.metadata["rejected_size_draws"] = initial.rejected;
  res.metadata["dt"] = integrator.dt;
  res.metadata["adaptive"] = integrator.adaptive;
  return res;
}

}  // namespace spinforge
