#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinforge/analytic/model.hpp"
#include "spinforge/harness/config.hpp"
#include "spinforge/solver/result.hpp"

namespace spinforge {

struct ScenarioOutcome {
  Backend backend = Backend::Auto;  ///< the backend that actually ran
  EvolutionResult result;           ///< empty for the analytic backend
  std::vector<PerturbativePrediction> model;
  std::vector<std::string> notices;  ///< backend downgrades
  double wall_seconds = 0.0;
};

/// Picks the backend (downgrading ED -> trajectories -> TWA when over budget) and runs it.
ScenarioOutcome compute_scenario(const ScenarioConfig& config);

/// Averages deterministic runs over a Gauss-Hermite grid of rounded ensemble sizes.
/// `run(n1, n2)` gets the two ensemble sizes (n2 = 0 for OAT, where n1 is the total).
EvolutionResult fluctuation_mixture(Protocol protocol, int atoms, double sigma_n, int nodes,
                                    const std::function<EvolutionResult(int, int)>& run);

struct RunSummary {
  std::filesystem::path dir;
  std::string backend;
  bool ok = false;
  std::string error;
  double t_opt = 0.0;
  double xi2_opt = 0.0;
  double xi2_opt_db = 0.0;
  double xi2_nominal_opt_db = 0.0;
  double xi2_final_db = 0.0;
  bool optimum_at_boundary = false;
  std::vector<std::string> notices;

  nlohmann::json to_json() const;
  static RunSummary from_json(const nlohmann::json& j);
};

/// Writes config.json, series.csv (or model.csv), metadata.json and xi2.svg into `dir`.
/// A solver failure still leaves config and metadata, with ok = false.
RunSummary run_scenario(const ScenarioConfig& config, const std::filesystem::path& dir);
/// Same, in `config.out`/<name>_<hash>.
RunSummary run_scenario(const ScenarioConfig& config);

/// Provenance block shared by all run folders.
nlohmann::json provenance();

/// Labeled model terms as CSV: t, beta, one column per term, total, total_db, valid.
void write_model_csv(std::ostream& out, const std::vector<PerturbativePrediction>& rows);

}  // namespace spinforge
