#include "spinforge/analytic/model.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spinforge {

double PerturbativePrediction::total() const {
  return std::accumulate(terms.begin(), terms.end(), 0.0,
                         [](double acc, const ModelTerm& term) { return acc + term.value; });
}

double PerturbativePrediction::term(const std::string& label) const {
  double sum = 0.0;
  for (const auto& t : terms) {
    if (t.label == label) sum += t.value;
  }
  return sum;
}

PerturbativePrediction xi2_model(Protocol protocol, const DecoherenceChannels& channels, double atoms, double chi,
                                 double sigma_n, double t, const ModelOptions& opts) {
  channels.validate();
  if (!(atoms > 0.0)) throw std::invalid_argument("xi2_model: atom number must be positive");
  if (t < 0.0) throw std::invalid_argument("xi2_model: negative time");
  if (!(sigma_n >= 0.0)) throw std::invalid_argument("xi2_model: sigma_n must be non-negative");
  const bool emission = channels.emission > 0.0;
  const bool dephasing = channels.dephasing > 0.0;
  if (emission && dephasing) {
    throw std::invalid_argument("xi2_model: emission and dephasing together have no perturbative form");
  }
  if (sigma_n > 0.0 && protocol == Protocol::OAT) {
    throw std::invalid_argument("xi2_model: number fluctuations are modelled for TSS only");
  }
  if (sigma_n > 0.0 && (emission || dephasing)) {
    throw std::invalid_argument("xi2_model: number fluctuations cannot be combined with single-particle decoherence");
  }

  PerturbativePrediction p;
  p.protocol = protocol;
  p.atoms = atoms;
  p.t = t;
  p.beta = 0.5 * atoms * chi * chi * t * t;
  const double n = atoms;
  const double shear = 1.0 / (2.0 * n * p.beta);
  const double collective = channels.collective * n * t;
  const double single_rate = emission ? channels.emission : channels.dephasing;
  const bool single = emission || dephasing;
  auto add = [&p](const char* label, const char* expression, double value) {
    p.terms.push_back({label, expression, value});
  };

  add("shear", "1/(2 N beta)", shear);
  if (protocol == Protocol::OAT) {
    if (!single && opts.include_curvature) add("curvature", "(2/3) beta^2", 2.0 / 3.0 * p.beta * p.beta);
    if (dephasing) {
      const double x = channels.dephasing * t;
      if (opts.expand_dephasing) {
        add("single_particle", "2 gamma_el t/(2 N beta)", 2.0 * x * shear);
        add("collective", "Gamma N t", collective);
      } else {
        add("single_particle", "(exp(2 gamma_el t) - 1)/(2 N beta)", std::expm1(2.0 * x) * shear);
        add("collective", "exp(gamma_el t) Gamma N t", std::exp(x) * collective);
      }
    } else {
      add("collective", "Gamma N t", collective);
    }
    if (emission) {
      if (opts.oat_emission == EmissionWeight::Binomial) {
        add("single_particle", "2 gamma_s t", 2.0 * channels.emission * t);
      } else {
        add("single_particle", "gamma_s t", channels.emission * t);
      }
    }
  } else {
    add("collective", "Gamma N t/(2 N beta)", collective * shear);
    if (!single && opts.include_curvature) {
      if (opts.tss_curvature == TssCurvature::Corrected) {
        add("curvature", "(14/9) beta^2", 14.0 / 9.0 * p.beta * p.beta);
      } else {
        add("curvature", "(2/3) beta^2", 2.0 / 3.0 * p.beta * p.beta);
      }
    }
    if (emission) add("single_particle", "gamma_s t", channels.emission * t);
    if (dephasing) add("single_particle", "gamma_el t", channels.dephasing * t);
    if (sigma_n > 0.0) add("number_fluctuation", "16 sigma_n^2 beta/N", 16.0 * sigma_n * sigma_n * p.beta / n);
  }

  p.validity.beta_small = p.beta < opts.validity_limit;
  p.validity.collective_small = collective < opts.validity_limit;
  p.validity.single_particle_small = single_rate * t < opts.validity_limit;
  return p;
}

}  // namespace spinforge
