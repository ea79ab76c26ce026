#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace spinforge {

struct FigureOptions {
  std::filesystem::path out = "figures";
  std::uint64_t seed = 1;
  int jobs = 0;
  std::size_t jump_trajectories = 128;  ///< quantum-jump runs for N beyond the dense cap
  std::size_t twa_trajectories = 100000;
};

struct FigureCheck {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  std::string relation;  ///< "abs": |value - target| <= tol, "rel": relative, "ge"/"le": one-sided bound
  bool pass = false;

  nlohmann::json to_json() const;
};

struct FigureReport {
  std::string name;
  std::filesystem::path dir;
  std::vector<FigureCheck> checks;
  std::vector<std::string> notes;  ///< scaling choices and backend downgrades
  double wall_seconds = 0.0;

  bool all_pass() const;
};

std::vector<std::string_view> figure_names();

/// fig2a, fig2inset, figS1 ... figS5. Writes data.csv (series, x, xi2, xi2_db, xi2_se),
/// figure.svg and figure.json with the checks into options.out/<name>.
FigureReport preset_figure(std::string_view name, const FigureOptions& options = {});

}  // namespace spinforge
