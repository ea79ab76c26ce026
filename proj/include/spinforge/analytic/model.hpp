#pragma once

#include <string>
#include <vector>

#include "spinforge/analytic/rates.hpp"
#include "spinforge/solver/protocol.hpp"

namespace spinforge {

enum class TssCurvature {
  Corrected,  ///< 14/9, absorbs the non-collective part of the two-spin Hamiltonian
  Bare,       ///< 2/3, the pure chi Sy^2 value
};

/// Weight of gamma_s t in the OAT emission model.
enum class EmissionWeight {
  Binomial,  ///< 2 gamma_s t
  Single,    ///< gamma_s t
};

struct ModelOptions {
  TssCurvature tss_curvature = TssCurvature::Corrected;
  EmissionWeight oat_emission = EmissionWeight::Binomial;
  bool expand_dephasing = false;  ///< OAT dephasing: (1 + 2 gamma t) and 1 instead of e^{2 gamma t} and e^{gamma t}
  bool include_curvature = true;  ///< the beta^2 term of the collective-only models
  double validity_limit = 0.2;    ///< beta, Gamma N t and gamma t below this count as small
};

struct ModelTerm {
  std::string label;       ///< shear, curvature, collective, single_particle, number_fluctuation
  std::string expression;  ///< the term as a formula in N, beta, t and the rates
  double value = 0.0;
};

struct ValidityFlags {
  bool beta_small = true;
  bool collective_small = true;
  bool single_particle_small = true;

  bool all() const { return beta_small && collective_small && single_particle_small; }
};

struct PerturbativePrediction {
  Protocol protocol = Protocol::OAT;
  double atoms = 0.0;
  double t = 0.0;
  double beta = 0.0;  ///< N chi^2 t^2 / 2
  std::vector<ModelTerm> terms;
  ValidityFlags validity;

  double total() const;
  double term(const std::string& label) const;  ///< 0 when absent
};

/// Short-time squeezing expansion for one decoherence channel plus collective emission.
/// gamma_s and gamma_el cannot be combined, and number fluctuations only enter TSS without
/// single-particle decoherence.
PerturbativePrediction xi2_model(Protocol protocol, const DecoherenceChannels& channels, double atoms, double chi,
                                 double sigma_n, double t, const ModelOptions& opts = {});

}  // namespace spinforge
