#pragma once

#include <nlohmann/json.hpp>

#include "spinforge/core/states.hpp"

namespace spinforge {

/// Snapshot layout: {"basis", "twice_S", "re", "im"}; "twice_S" is an integer for a Dicke
/// ket and [2*j1, 2*j2] otherwise; truncated kets add "n_trunc". Amplitudes are flattened in
/// the representation's ordering (density matrices row-major, with "dim").
nlohmann::json to_json(const Ket& ket);
Ket ket_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DensityOperator& rho);
DensityOperator density_from_json(const nlohmann::json& j);

}  // namespace spinforge
