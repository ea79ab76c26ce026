#include "spinforge/analytic/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace spinforge {

CavityRates cavity_rates(double g, double kappa, double detuning) {
  if (detuning == 0.0 && kappa == 0.0) throw std::invalid_argument("cavity_rates: detuning and kappa both zero");
  if (kappa < 0.0) throw std::invalid_argument("cavity_rates: negative kappa");
  const double denom = 4.0 * detuning * detuning + kappa * kappa;
  const double g2 = 4.0 * g * g;
  return {g, kappa, detuning, g2 * detuning / denom, g2 * kappa / denom};
}

CavityRates far_detuned_rates(double g, double kappa, double detuning) {
  if (detuning == 0.0) throw std::invalid_argument("far_detuned_rates: zero detuning");
  const double g2 = g * g;
  return {g, kappa, detuning, g2 / detuning, g2 * kappa / (detuning * detuning)};
}

double cooperativity(double g, double kappa, double gamma) {
  if (!(kappa > 0.0) || !(gamma > 0.0)) throw std::invalid_argument("cooperativity: kappa and gamma must be positive");
  return 4.0 * g * g / (kappa * gamma);
}

void DecoherenceChannels::validate() const {
  if (!(collective >= 0.0) || !(emission >= 0.0) || !(dephasing >= 0.0)) {
    throw std::invalid_argument("DecoherenceChannels: rates must be non-negative");
  }
}

OatCorrelators oat_exact_correlators(double spin, double tau) {
  if (!(spin > 0.0)) throw std::invalid_argument("oat_exact_correlators: spin must be positive");
  const double half = 0.5 * spin;
  const double pair = spin * (spin - 0.5);
  if (pair == 0.0) return {half, half, 0.0};
  // 2S-2 is an integer, so pow keeps the sign of a negative base
  const double power = 2.0 * spin - 2.0;
  const double var_sy = half + 0.5 * pair * (1.0 - std::pow(std::cos(2.0 * tau), power));
  const double cross = 2.0 * pair * std::sin(tau) * std::pow(std::cos(tau), power);
  return {var_sy, half, cross};
}

double collective_emission_variance(double atoms, double gamma, double t) {
  if (t < 0.0) throw std::invalid_argument("collective_emission_variance: negative time");
  const double th = std::tanh(0.5 * atoms * gamma * t);
  return 0.5 * atoms * th * (1.0 - th);
}

}  // namespace spinforge
