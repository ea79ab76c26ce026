#pragma once

#include <limits>
#include <string>
#include <vector>

#include "spinforge/analytic/model.hpp"

namespace spinforge {

enum class OptimumSource { ClosedForm, Numeric };

struct Optimum {
  double t_opt = 0.0;  ///< 1/chi units for the fixed-ratio optima, seconds for the detuning optima
  double detuning_opt = std::numeric_limits<double>::quiet_NaN();
  double xi2_opt = 0.0;
  OptimumSource source = OptimumSource::ClosedForm;

  double xi2_db() const;
};

struct Discrepancy {
  std::string quantity;
  double stated = 0.0;   ///< closed-form value
  double derived = 0.0;  ///< from the model itself
  double relative() const;
};

/// A closed-form optimum next to the numeric minimum of the model it was derived from.
struct OptimumResult {
  Optimum closed_form;
  Optimum numeric;
  double tolerance = 1e-6;  ///< relative, on xi2
  bool numeric_on_boundary = false;
  std::vector<Discrepancy> discrepancies;

  bool confirmed() const;  ///< closed-form xi2 within tolerance of the numeric minimum
};

Optimum oat_ideal_optimum(double atoms, double chi = 1.0);
Optimum tss_ideal_optimum(double atoms, double chi = 1.0);

/// Optimum over t at fixed Gamma/chi, time in 1/chi. The OAT numeric check drops the curvature
/// term when Gamma > 0, as the closed form does.
OptimumResult optimum_fixed_ratio(Protocol protocol, double atoms, double gamma_over_chi,
                                  const ModelOptions& opts = {});

enum class SingleParticleChannel { Emission, Dephasing };

/// Optimum over t and cavity detuning with far-detuned rates. Numeric search covers four decades
/// either side of the closed-form point.
OptimumResult optimum_over_detuning(Protocol protocol, SingleParticleChannel channel, double atoms, double g,
                                    double kappa, double gamma, const ModelOptions& opts = {});

enum class FluctuationRegime { IdealLimited, Crossover, FluctuationLimited };

std::string_view to_string(FluctuationRegime regime);

struct NumberFluctuationBound {
  double xi2_bound = 0.0;  ///< delta N / N with delta N = sqrt(2) sigma_n
  double delta_n = 0.0;
  double ratio = 0.0;      ///< sigma_n / N^{1/3}
  double ideal_xi2 = 0.0;  ///< TSS without fluctuations
  FluctuationRegime regime = FluctuationRegime::IdealLimited;
};

/// Regime edges at ratio 0.5 and 2.
NumberFluctuationBound number_fluctuation_bound(double atoms, double sigma_n);

}  // namespace spinforge
