#include <cmath>
#include <random>
#include <stdexcept>

#include "spinforge/numerics/random.hpp"
#include "spinforge/twa/twa.hpp"

namespace spinforge {

EnsembleSizes TrajectoryBatch::sizes_of(std::size_t i) const {
  if (!sizes.empty()) return sizes[i];
  return protocol == Protocol::OAT ? EnsembleSizes{atoms, 0.0} : EnsembleSizes{0.5 * atoms, 0.5 * atoms};
}

TrajectoryBatch sample_initial(const WignerSamplingSpec& spec) {
  if (spec.n_traj < 2) throw std::invalid_argument("sample_initial: n_traj must be at least 2");
  if (!(spec.sigma_n >= 0.0)) throw std::invalid_argument("sample_initial: sigma_n must be non-negative");
  if (!(spec.atoms > 0.0)) throw std::invalid_argument("sample_initial: atom number must be positive");
  const bool tss = spec.protocol == Protocol::TSS;
  if (tss && std::fmod(spec.atoms, 2.0) != 0.0) throw std::invalid_argument("sample_initial: TSS needs an even N");

  TrajectoryBatch batch;
  batch.protocol = spec.protocol;
  batch.atoms = spec.atoms;
  batch.points.resize(spec.n_traj);
  if (spec.sigma_n > 0.0) batch.sizes.resize(spec.n_traj);

  const double nominal = tss ? 0.5 * spec.atoms : spec.atoms;
  const int ensembles = tss ? 2 : 1;
  std::size_t attempts = 0;
  for (std::size_t i = 0; i < spec.n_traj; ++i) {
    auto rng = make_stream(spec.seed, i);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // transverse draws come first so sigma_n does not shift them
    std::array<double, 4> g{};
    for (double& v : g) v = gauss(rng);
    EnsembleSizes n{nominal, tss ? nominal : 0.0};
    if (spec.sigma_n > 0.0) {
      for (int e = 0; e < ensembles; ++e) {
        do {
          ++attempts;
          n[e] = nominal + spec.sigma_n * gauss(rng);
          if (n[e] <= 0.0) ++batch.rejected;
        } while (n[e] <= 0.0);
      }
      batch.sizes[i] = n;
    }
    BlochPoint& p = batch.points[i];
    p.fill(0.0);
    for (int e = 0; e < ensembles; ++e) {
      // spin length n/2, transverse variance (n/2)/2
      const double width = std::sqrt(0.25 * n[e]);
      p[3 * e] = (e == 0 ? 0.5 : -0.5) * n[e];
      p[3 * e + 1] = width * g[2 * e];
      p[3 * e + 2] = width * g[2 * e + 1];
    }
  }
  if (attempts > 0 && static_cast<double>(batch.rejected) > 0.1 * static_cast<double>(attempts)) {
    throw std::domain_error("sample_initial: sigma_n too large, more than 10% of size draws were non-positive");
  }
  return batch;
}

}  // namespace spinforge
