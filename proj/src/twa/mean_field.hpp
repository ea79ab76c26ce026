#pragma once

#include <functional>

#include "spinforge/twa/twa.hpp"

namespace spinforge::twa_detail {

/// Integrates one trajectory over `times` and hands each sample to `sink(k, point)`.
void evolve_one(const BlochPoint& start, const EnsembleSizes& sizes, Protocol protocol, double atoms,
                const MeanFieldParams& params, std::span<const double> times, const TwaIntegratorOptions& opts,
                const std::function<void(std::size_t, const BlochPoint&)>& sink);

int resolve_jobs(int jobs);

/// Whether the shear uses chi Sy^2 rather than chi S+S-.
bool shear_sy_only(Protocol protocol, const MeanFieldParams& p);

}  // namespace spinforge::twa_detail
