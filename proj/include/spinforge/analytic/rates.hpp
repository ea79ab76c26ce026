#pragma once

namespace spinforge {

/// Dispersive and dissipative rates of the adiabatically eliminated cavity.
struct CavityRates {
  double g = 0.0;
  double kappa = 0.0;
  double detuning = 0.0;
  double chi = 0.0;
  double gamma = 0.0;  ///< collective emission
};

/// chi = 4g^2 D / (4D^2 + kappa^2), Gamma = 4g^2 kappa / (4D^2 + kappa^2).
CavityRates cavity_rates(double g, double kappa, double detuning);

/// Leading order for |detuning| >> kappa: chi = g^2/D, Gamma = g^2 kappa / D^2.
CavityRates far_detuned_rates(double g, double kappa, double detuning);

/// 4g^2 / (kappa gamma)
double cooperativity(double g, double kappa, double gamma);

struct DecoherenceChannels {
  double collective = 0.0;  ///< Gamma
  double emission = 0.0;    ///< single-particle gamma_s
  double dephasing = 0.0;   ///< single-particle gamma_el

  void validate() const;
};

struct OatCorrelators {
  double var_sy = 0.0;
  double var_sz = 0.0;
  double cross_yz = 0.0;  ///< <Sy Sz + Sz Sy>
};

/// Closed-form second moments of chi Sz^2 acting on the +x coherent state, tau = chi t.
OatCorrelators oat_exact_correlators(double spin, double tau);

/// Excess Var(Sz) of the equatorial state after collective decay for time t.
double collective_emission_variance(double atoms, double gamma, double t);

}  // namespace spinforge
