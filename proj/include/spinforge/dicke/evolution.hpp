#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spinforge/dicke/model.hpp"
#include "spinforge/numerics/integrator.hpp"
#include "spinforge/solver/result.hpp"

namespace spinforge {

/// Moments of a pure state (any norm; divided out) or of a density matrix under a model.
MomentRecord moments_of_state(const SpinModel& model, const CVector& psi);
MomentRecord moments_of_density(const SpinModel& model, const CMatrix& rho, bool check_positivity);

// --- exact evolvers on a prepared model ---

/// Dense Liouville evolution of rho with the dissipator normalized as
/// d rho/dt = -i[H, rho] + sum_k (2 L rho L^+ - {L^+ L, rho}).
EvolutionResult evolve_density(const SpinModel& model, const CMatrix& rho0, std::span<const double> times,
                               const IntegratorOptions& opts = {}, bool check_positivity = false);

/// Schroedinger evolution; the model must have no jumps.
EvolutionResult evolve_pure(const SpinModel& model, const CVector& psi0, std::span<const double> times,
                            const IntegratorOptions& opts = {});

enum class Unraveling { Auto, Jump, PhaseNoise };

struct TrajectoryOptions {
  int n_traj = 256;
  std::uint64_t seed = 1;
  int jobs = 0;  ///< 0 = hardware concurrency
  Unraveling method = Unraveling::Auto;
  double noise_step = 0.0;  ///< phase-noise step; 0 = 1/400 of the time span
};

/// Monte Carlo average over pure-state trajectories. Jump: waiting-time quantum jumps.
/// PhaseNoise: random-unitary unraveling, for diagonal Hermitian jump operators only.
EvolutionResult trajectory_unravel(const SpinModel& model, const CVector& psi0, std::span<const double> times,
                                   const TrajectoryOptions& traj, const IntegratorOptions& opts = {});
EvolutionResult trajectory_unravel(const LindbladSpec& spec, const Ket& psi0, std::span<const double> times,
                                   const TrajectoryOptions& traj, const IntegratorOptions& opts = {});

// --- protocol entry points ---

struct OatMasterOptions {
  IntegratorOptions integrator;
  bool twist_only = false;    ///< chi Sz^2 instead of chi S+S-
  bool full_density = false;  ///< dense Liouville instead of the three-band reduction
  int max_atoms = 1000;
};

EvolutionResult evolve_oat_master(int atoms, double chi, double gamma, std::span<const double> times,
                                  const OatMasterOptions& opts = {});

enum class TssVariant { Full, SyOnly };
enum class TssBackend { Auto, Dense, Trajectories };

struct TssOptions {
  int n_trunc = 5;
  double convergence_tolerance = 1e-6;
  IntegratorOptions integrator;
  TssVariant variant = TssVariant::Full;
  TssBackend backend = TssBackend::Auto;
  TrajectoryOptions trajectories;
  double budget_gib = 0.0;  ///< 0 = SPINFORGE_BUDGET_GIB or 2
  int atoms_first = -1;     ///< per-ensemble atom numbers; -1 = N/2 each
  int atoms_second = -1;
};

EvolutionResult evolve_tss_unitary_truncated(int atoms, double chi, std::span<const double> times,
                                             const TssOptions& opts = {});
EvolutionResult evolve_tss_master_truncated(int atoms, double chi, double gamma, std::span<const double> times,
                                            const TssOptions& opts = {});

/// Lab-frame TSS on the full product space: evolve under chi S+S-, undo the rotation generated by
/// the conserved chi Sz, then flip the second ensemble.
EvolutionResult evolve_tss_lab(int atoms, double chi, std::span<const double> times,
                               const IntegratorOptions& opts = {});

/// Memory budget in bytes: explicit value, else SPINFORGE_BUDGET_GIB, else 2 GiB.
double memory_budget_bytes(double budget_gib = 0.0);
/// Working set of the dense Liouville integrator for a d-dimensional space.
double dense_liouville_bytes(int dim);

}  // namespace spinforge
