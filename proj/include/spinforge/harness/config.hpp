#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinforge/solver/protocol.hpp"

namespace spinforge {

/// Malformed input. Messages name the line (text form) or the field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `key = value` lines with `#` comments and `[section]` / `[a.b]` headers that open nested
/// objects. Values: numbers, true/false, quoted or bare strings, flat [a, b] arrays.
/// Text starting with '{' is read as JSON instead.
nlohmann::json parse_config_text(std::string_view text);
nlohmann::json load_config_file(const std::string& path);

enum class Backend { Auto, Exact, Trajectories, Twa, Analytic };

std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view name);

struct CavitySetting {
  double g = 0.0;
  double kappa = 0.0;
  double detuning = 0.0;
};

struct TimeGrid {
  std::vector<double> values;  ///< explicit times; otherwise built from the range below
  double t_min = 0.0;
  double t_max = 0.0;
  int points = 0;
  bool log_spacing = false;

  std::vector<double> resolve() const;
};

struct ScenarioConfig {
  std::string name;
  Protocol protocol = Protocol::OAT;
  Backend backend = Backend::Auto;
  int atoms = 0;
  double chi = 1.0;
  double gamma = 0.0;     ///< collective emission
  double gamma_s = 0.0;   ///< single-particle emission
  double gamma_el = 0.0;  ///< single-particle dephasing
  std::optional<CavitySetting> cavity;  ///< replaces chi and gamma by the cavity rates
  double sigma_n = 0.0;
  TimeGrid times;
  std::size_t n_traj = 0;  ///< 0 = backend default
  std::uint64_t seed = 1;
  int n_trunc = 5;
  bool sy_only = false;    ///< TSS dissipator reduced to sqrt(Gamma/2) Sy
  int fluctuation_nodes = 3;  ///< Gauss-Hermite nodes per ensemble for exact runs with sigma_n
  int jobs = 0;
  std::string out = "runs";

  /// Effective (chi, Gamma) after the optional cavity conversion.
  double effective_chi() const;
  double effective_gamma() const;
};

/// Schema check with field-precise messages; unknown keys are rejected.
ScenarioConfig scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& c);

/// Key names, types and defaults, for `spinforge run --schema`.
nlohmann::json scenario_schema();

/// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string content_hash(const nlohmann::json& j);

}  // namespace spinforge
