#pragma once

#include <functional>
#include <span>
#include <vector>

namespace spinforge {

struct Minimum1D {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search on [lo, hi]; f must be unimodal there.
Minimum1D golden_section(const std::function<double(double)>& f, double lo, double hi, double xtol = 1e-10);

/// Evaluates f on `points` uniform nodes of [lo, hi], then refines the best bracket by golden section.
Minimum1D scan_and_refine(const std::function<double(double)>& f, double lo, double hi, int points = 64,
                          double xtol = 1e-10);

struct MinimumND {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  double step = 0.5;  ///< initial simplex edge along each axis
  double xtol = 1e-10;
  double ftol = 0.0;  ///< relative spread of the simplex values; 0 disables
  int max_evaluations = 20000;
};

using ObjectiveND = std::function<double(std::span<const double>)>;

MinimumND nelder_mead(const ObjectiveND& f, std::vector<double> start, const NelderMeadOptions& opts = {});

}  // namespace spinforge
