#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spinforge/harness/run.hpp"

namespace spinforge {

enum class SweepAxis { GammaOverChi, Atoms, DeltaN, Time, Detuning };

std::string_view to_string(SweepAxis axis);

struct SweepSpec {
  std::string name = "sweep";
  nlohmann::json base = nlohmann::json::object();  ///< scenario keys shared by every point
  SweepAxis axis = SweepAxis::GammaOverChi;
  std::vector<double> values;
  std::map<std::size_t, nlohmann::json> overrides;  ///< per-point scenario keys, by point index
  bool auto_time = false;  ///< t_max from the analytic optimum of each point
  int jobs = 0;
  std::string out = "sweeps";
};

/// Keys: name, axis, values or range = [start, stop, count] with spacing = linear|log,
/// auto_time, jobs, out, a [base] section and [overrides.<index>] sections.
SweepSpec sweep_from_json(const nlohmann::json& j);

/// Scenario JSON of point i: base, then the axis value, then its overrides.
nlohmann::json point_config(const SweepSpec& spec, std::size_t i);

/// End of a time grid that brackets the expected optimum: three times the longer of the ideal
/// and the collective-emission optimal times.
double suggest_t_max(Protocol protocol, int atoms, double chi, double gamma, double sigma_n = 0.0);

struct SweepPoint {
  std::size_t index = 0;
  double value = 0.0;
  std::string hash;
  bool reused = false;  ///< found complete on disk
  RunSummary summary;
};

struct SweepOutcome {
  std::filesystem::path dir;
  SweepAxis axis = SweepAxis::GammaOverChi;
  std::vector<SweepPoint> points;

  bool all_ok() const;
  void write_csv(std::ostream& out) const;
};

/// Points run on a bounded pool; each lands in dir/points/<hash>. Points whose folder already
/// holds a successful summary are not recomputed. Writes dir/aggregate.csv and dir/index.jsonl.
SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& dir);
SweepOutcome run_sweep(const SweepSpec& spec);

}  // namespace spinforge
