#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinforge/numerics/integrator.hpp"
#include "spinforge/squeezing/squeezing.hpp"

namespace spinforge {

struct MomentRecord {
  double t = 0.0;
  Vec3 mean = Vec3::Zero();      ///< measurement frame
  Mat3 second = Mat3::Zero();    ///< symmetrized <(Sa Sb + Sb Sa)/2>
  Vec3 mean_se = Vec3::Zero();   ///< standard errors, zero for deterministic backends
  Mat3 second_se = Mat3::Zero();
  double lab_sz = 0.0;
  double emission = 0.0;
  double energy = 0.0;
  double trace_drift = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();  ///< only when checked
  double xi2_se = std::numeric_limits<double>::quiet_NaN();           ///< sampling backends with a jackknife
  std::vector<double> block_populations;
  QuadratureCorrelators correlators;
  SqueezingReport squeezing;
};

struct EvolutionResult {
  std::string backend;
  std::string time_unit = "1/chi";
  AxisPair axes = AxisPair::SySz;
  double atoms = 0.0;
  std::vector<MomentRecord> records;
  bool converged = true;  ///< truncation check: lowest block stays below tolerance
  std::vector<std::string> warnings;
  nlohmann::json metadata = nlohmann::json::object();
  IntegrationStats stats;

  std::vector<double> times() const;
  void write_csv(std::ostream& out) const;
  nlohmann::json sidecar() const;
};

/// Fills correlators and squeezing report of every record from its moments.
void attach_squeezing(EvolutionResult& result);

/// Minimum of xi^2 over the records, refined by a parabola through the three lowest samples.
struct SqueezingOptimum {
  double t = 0.0;
  double xi2 = 0.0;
  double xi2_db = 0.0;
  std::size_t index = 0;
  bool at_boundary = false;
};
enum class Normalization { Wineland, Nominal };
SqueezingOptimum best_squeezing(const EvolutionResult& result, Normalization norm = Normalization::Wineland);

}  // namespace spinforge
