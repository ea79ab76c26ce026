#pragma once

#include <string_view>

namespace spinforge {

/// One-axis twisting on a single ensemble, or two-spin squeezing on back-to-back ensembles.
enum class Protocol { OAT, TSS };

std::string_view to_string(Protocol p);
Protocol protocol_from_string(std::string_view name);

}  // namespace spinforge
