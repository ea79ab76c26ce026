#include "spinforge/numerics/integrator.hpp"

namespace spinforge {

void validate_time_grid(std::span<const double> times, double t0) {
  if (times.empty()) throw std::invalid_argument("time grid is empty");
  double prev = t0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw std::invalid_argument("time grid contains a non-finite value");
    if (times[i] < prev) throw std::invalid_argument("time grid must be non-decreasing and start at or after t0");
    prev = times[i];
  }
}

}  // namespace spinforge
