#include "spinforge/solver/protocol.hpp"

#include <stdexcept>
#include <string>

namespace spinforge {

std::string_view to_string(Protocol p) { return p == Protocol::OAT ? "OAT" : "TSS"; }

Protocol protocol_from_string(std::string_view name) {
  if (name == "OAT" || name == "oat") return Protocol::OAT;
  if (name == "TSS" || name == "tss") return Protocol::TSS;
  throw std::invalid_argument("unknown protocol '" + std::string(name) + "'");
}

}  // namespace spinforge
