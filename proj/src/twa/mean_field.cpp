#include "mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/numeric/odeint.hpp>

#include "spinforge/numerics/parallel.hpp"

namespace spinforge {

namespace twa_detail {

namespace odeint = boost::numeric::odeint;

bool shear_sy_only(Protocol protocol, const MeanFieldParams& p) {
  switch (p.hamiltonian) {
    case MeanFieldHamiltonian::Exchange: return false;
    case MeanFieldHamiltonian::SySquared: return true;
    default: return protocol == Protocol::TSS && p.gamma_s > 0.0;
  }
}

namespace {

struct MeanField {
  double chi;
  double gamma_s;
  double gamma_el;
  bool sy_only;
  bool frozen;
  double sy0;
  EnsembleSizes n;

  void operator()(const BlochPoint& s, BlochPoint& ds, double) const {
    const double big_x = s[0] + s[3];
    const double big_y = frozen ? sy0 : s[1] + s[4];
    // precession about (2 chi X, 2 chi Y, 0), or (0, 2 chi Y, 0) for the Sy^2 shear
    const double wx = sy_only ? 0.0 : 2.0 * chi * big_x;
    const double wy = 2.0 * chi * big_y;
    const double transverse = 0.5 * (gamma_s + gamma_el);
    for (int e = 0; e < 2; ++e) {
      const double x = s[3 * e], y = s[3 * e + 1], z = s[3 * e + 2];
      ds[3 * e] = wy * z - transverse * x;
      ds[3 * e + 1] = -wx * z - transverse * y;
      ds[3 * e + 2] = wx * y - wy * x - 0.5 * gamma_s * (z + 0.5 * n[e]);
    }
  }
};

}  // namespace

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void evolve_one(const BlochPoint& start, const EnsembleSizes& sizes, Protocol protocol, double atoms,
                const MeanFieldParams& params, std::span<const double> times, const TwaIntegratorOptions& opts,
                const std::function<void(std::size_t, const BlochPoint&)>& sink) {
  const MeanField field{params.chi,          params.gamma_s, params.gamma_el, shear_sy_only(protocol, params),
                        params.frozen_sy,    start[1] + start[4], sizes};
  BlochPoint s = start;
  const double rate = std::max({std::abs(params.chi) * std::sqrt(atoms), params.gamma_s, params.gamma_el});
  double t = 0.0;
  std::size_t k = 0;
  for (; k < times.size() && times[k] <= 0.0; ++k) sink(k, s);
  if (k == times.size()) return;
  if (rate == 0.0) {
    for (; k < times.size(); ++k) sink(k, s);
    return;
  }
  const double dt = opts.dt > 0.0 ? opts.dt : 0.01 / rate;
  if (opts.adaptive) {
    auto stepper = odeint::make_controlled(opts.atol, opts.rtol, odeint::runge_kutta_dopri5<BlochPoint>());
    for (; k < times.size(); ++k) {
      try {
        odeint::integrate_adaptive(stepper, field, s, t, times[k], dt);
      } catch (const std::exception& e) {
        throw IntegrationError(std::string("TWA step-size underflow: ") + e.what(), t);
      }
      t = times[k];
      sink(k, s);
    }
    return;
  }
  odeint::runge_kutta4<BlochPoint> stepper;
  for (; k < times.size(); ++k) {
    const double gap = times[k] - t;
    const auto steps = static_cast<long>(std::ceil(gap / dt - 1e-9));
    const double h = gap / static_cast<double>(std::max(1L, steps));
    for (long i = 0; i < steps; ++i) stepper.do_step(field, s, t + i * h, h);
    t = times[k];
    sink(k, s);
  }
}

}  // namespace twa_detail

std::vector<std::string> validity_warnings(const MeanFieldParams& params, std::span<const double> times) {
  std::vector<std::string> out;
  if (!times.empty() && params.gamma_s * times.back() > 0.5) {
    std::ostringstream msg;
    msg << "gamma_s * t_max = " << params.gamma_s * times.back()
        << " exceeds 0.5; the mean-field decay treatment assumes weak emission";
    out.push_back(msg.str());
  }
  return out;
}

std::vector<TrajectoryBatch> evolve_trajectories(const TrajectoryBatch& initial, const MeanFieldParams& params,
                                                 std::span<const double> times, const TwaIntegratorOptions& opts) {
  if (times.empty()) throw std::invalid_argument("evolve_trajectories: empty time grid");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < 0.0 || (k > 0 && times[k] < times[k - 1])) {
      throw std::invalid_argument("evolve_trajectories: times must be non-negative and ascending");
    }
  }
  if (params.gamma_s < 0.0 || params.gamma_el < 0.0) throw std::invalid_argument("evolve_trajectories: negative rate");
  std::vector<TrajectoryBatch> series(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    series[k].protocol = initial.protocol;
    series[k].atoms = initial.atoms;
    series[k].t = times[k];
    series[k].points.resize(initial.size());
    series[k].sizes = initial.sizes;
  }
  parallel_for(initial.size(), twa_detail::resolve_jobs(opts.jobs), [&](std::size_t i) {
    twa_detail::evolve_one(initial.points[i], initial.sizes_of(i), initial.protocol, initial.atoms, params, times, opts,
                           [&](std::size_t k, const BlochPoint& p) { series[k].points[i] = p; });
  });
  return series;
}

}  // namespace spinforge
