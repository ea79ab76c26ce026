#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spinforge/solver/protocol.hpp"
#include "spinforge/solver/result.hpp"

namespace spinforge {

struct WignerSamplingSpec {
  double atoms = 0.0;
  Protocol protocol = Protocol::TSS;
  double sigma_n = 0.0;  ///< atom-number standard deviation per ensemble
  std::size_t n_traj = 10000;
  std::uint64_t seed = 1;
};

/// (S1x, S1y, S1z, S2x, S2y, S2z) in spin units. OAT leaves the second ensemble empty.
using BlochPoint = std::array<double, 6>;
using EnsembleSizes = std::array<double, 2>;

struct TrajectoryBatch {
  Protocol protocol = Protocol::TSS;
  double atoms = 0.0;
  double t = 0.0;
  std::vector<BlochPoint> points;
  std::vector<EnsembleSizes> sizes;  ///< per trajectory; empty without number fluctuations
  std::size_t rejected = 0;          ///< size draws discarded for a non-positive ensemble

  std::size_t size() const { return points.size(); }
  EnsembleSizes sizes_of(std::size_t i) const;
};

enum class MeanFieldHamiltonian {
  Auto,       ///< SySquared for TSS with spontaneous emission, Exchange otherwise
  Exchange,   ///< chi S+S- of the total spin
  SySquared,  ///< chi Sy^2 of the total spin
};

struct MeanFieldParams {
  double chi = 1.0;
  double gamma_s = 0.0;   ///< spontaneous emission
  double gamma_el = 0.0;  ///< dephasing
  bool frozen_sy = false;  ///< shear with the initial total Sy
  MeanFieldHamiltonian hamiltonian = MeanFieldHamiltonian::Auto;
};

struct TwaIntegratorOptions {
  bool adaptive = false;
  double dt = 0.0;  ///< fixed RK4 step; 0 = 0.01 / (|chi| sqrt(N))
  double rtol = 1e-9;
  double atol = 1e-9;
  int jobs = 0;  ///< 0 = hardware concurrency
};

struct CorrelatorOptions {
  bool enforce_sy_variance = true;  ///< pin Var(Sy) to N/4 when gamma_s > 0
  int blocks = 256;                 ///< jackknife blocks, capped at n_traj / 2
};

TrajectoryBatch sample_initial(const WignerSamplingSpec& spec);

/// One batch per requested time; times[0] may equal 0.
std::vector<TrajectoryBatch> evolve_trajectories(const TrajectoryBatch& initial, const MeanFieldParams& params,
                                                 std::span<const double> times,
                                                 const TwaIntegratorOptions& opts = {});

/// Measurement-frame moments with jackknife errors. TSS reports (Dx, Sy, Dz) with D = S1 - S2,
/// i.e. after the pi rotation of the second ensemble; OAT reports the single spin.
EvolutionResult batch_correlators(std::span<const TrajectoryBatch> series, const MeanFieldParams& params,
                                  const CorrelatorOptions& opts = {});

/// sample_initial + evolve_trajectories + batch_correlators without storing the series.
/// Bit-identical to the three-step path.
EvolutionResult run_twa(const WignerSamplingSpec& spec, const MeanFieldParams& params, std::span<const double> times,
                        const TwaIntegratorOptions& integrator = {}, const CorrelatorOptions& correlators = {});

/// Warnings for parameters outside the weak-decoherence regime.
std::vector<std::string> validity_warnings(const MeanFieldParams& params, std::span<const double> times);

/// Little-endian dump: "SFTWA001", then uint64 n_frames, n_traj, has_sizes, then per frame
/// the time, n_traj x 6 Bloch components and, if present, n_traj x 2 ensemble sizes (all float64).
void write_binary(std::ostream& out, std::span<const TrajectoryBatch> series);
std::vector<TrajectoryBatch> read_binary(std::istream& in, Protocol protocol, double atoms);

}  // namespace spinforge
