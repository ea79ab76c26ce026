#include "spinforge/analytic/optimum.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "spinforge/numerics/minimize.hpp"
#include "spinforge/squeezing/squeezing.hpp"

namespace spinforge {

namespace {

constexpr double kLocationTolerance = 1e-4;
constexpr double kNumericSpan = 9.210340371976184;  // ln 1e4
constexpr double kGridSpan = 6.907755278982137;     // ln 1e3

void add_if_apart(OptimumResult& r, const std::string& quantity, double stated, double derived, double tol) {
  const double rel = std::abs(stated - derived) / std::abs(derived);
  if (!(rel <= tol)) r.discrepancies.push_back({quantity, stated, derived});
}

void compare(OptimumResult& r) {
  add_if_apart(r, "xi2_opt", r.closed_form.xi2_opt, r.numeric.xi2_opt, r.tolerance);
  add_if_apart(r, "t_opt", r.closed_form.t_opt, r.numeric.t_opt, kLocationTolerance);
  if (!std::isnan(r.closed_form.detuning_opt)) {
    add_if_apart(r, "detuning_opt", r.closed_form.detuning_opt, r.numeric.detuning_opt, kLocationTolerance);
  }
}

}  // namespace

double Optimum::xi2_db() const { return to_db(xi2_opt); }

double Discrepancy::relative() const { return (stated - derived) / derived; }

bool OptimumResult::confirmed() const {
  return std::abs(closed_form.xi2_opt - numeric.xi2_opt) <= tolerance * std::abs(numeric.xi2_opt);
}

Optimum oat_ideal_optimum(double atoms, double chi) {
  const double tau = std::pow(3.0, 1.0 / 6.0) * std::pow(atoms, -2.0 / 3.0);
  return {tau / chi, std::numeric_limits<double>::quiet_NaN(), std::cbrt(9.0 / 8.0) * std::pow(atoms, -2.0 / 3.0),
          OptimumSource::ClosedForm};
}

Optimum tss_ideal_optimum(double atoms, double chi) {
  const double beta = std::cbrt(9.0 / (56.0 * atoms));
  return {std::sqrt(2.0 * beta / atoms) / chi, std::numeric_limits<double>::quiet_NaN(),
          std::cbrt(21.0) / (2.0 * std::pow(atoms, 2.0 / 3.0)), OptimumSource::ClosedForm};
}

OptimumResult optimum_fixed_ratio(Protocol protocol, double atoms, double gamma_over_chi, const ModelOptions& opts) {
  if (!(gamma_over_chi >= 0.0)) throw std::invalid_argument("optimum_fixed_ratio: Gamma/chi must be non-negative");
  if (!(atoms > 0.0)) throw std::invalid_argument("optimum_fixed_ratio: atom number must be positive");
  const double ratio = gamma_over_chi;
  OptimumResult r;
  ModelOptions model = opts;

  if (protocol == Protocol::OAT) {
    if (ratio == 0.0) {
      r.closed_form = oat_ideal_optimum(atoms);
    } else {
      r.closed_form.t_opt = std::cbrt(2.0 / (atoms * atoms * atoms * ratio));
      r.closed_form.xi2_opt = 3.0 / std::cbrt(4.0) * std::cbrt(ratio * ratio);
      model.include_curvature = false;
    }
  } else {
    if (opts.tss_curvature == TssCurvature::Bare) {
      r.closed_form = oat_ideal_optimum(atoms);
    } else {
      r.closed_form = tss_ideal_optimum(atoms);
    }
    const double beta = 0.5 * atoms * r.closed_form.t_opt * r.closed_form.t_opt;
    r.closed_form.xi2_opt += ratio / std::sqrt(2.0 * atoms * beta);
  }

  const DecoherenceChannels channels{ratio, 0.0, 0.0};
  auto f = [&](double u) { return xi2_model(protocol, channels, atoms, 1.0, 0.0, std::exp(u), model).total(); };
  const double centre = std::log(r.closed_form.t_opt);
  const Minimum1D m = scan_and_refine(f, centre - kGridSpan, centre + kGridSpan, 241);
  r.numeric = {std::exp(m.x), std::numeric_limits<double>::quiet_NaN(), m.value, OptimumSource::Numeric};
  r.numeric_on_boundary = std::abs(m.x - centre) > kGridSpan - 1e-6;
  compare(r);

  if (protocol == Protocol::OAT && ratio > 0.0) {
    r.discrepancies.push_back(
        {"xi2_opt alternative coefficient 2/3^(2/3)", 2.0 / std::cbrt(9.0) * std::cbrt(ratio * ratio), r.numeric.xi2_opt});
  }
  return r;
}

OptimumResult optimum_over_detuning(Protocol protocol, SingleParticleChannel channel, double atoms, double g,
                                    double kappa, double gamma, const ModelOptions& opts) {
  if (!(gamma > 0.0) || !(g > 0.0) || !(kappa > 0.0)) {
    throw std::invalid_argument("optimum_over_detuning: g, kappa and gamma must be positive");
  }
  if (!(atoms > 0.0)) throw std::invalid_argument("optimum_over_detuning: atom number must be positive");
  const double eta = cooperativity(g, kappa, gamma);
  const double neta = atoms * eta;
  const bool emission = channel == SingleParticleChannel::Emission;
  OptimumResult r;

  if (protocol == Protocol::TSS) {
    r.closed_form.xi2_opt = std::sqrt(24.0 / neta);
    r.closed_form.t_opt = 2.0 / gamma * std::sqrt(2.0 / (3.0 * neta));
    r.closed_form.detuning_opt = kappa * std::pow(neta / 18.0, 0.25);
  } else if (emission) {
    const double c = opts.oat_emission == EmissionWeight::Binomial ? 2.0 : 1.0;
    const double x = std::cbrt(4.0 / (c * c)) / std::cbrt(neta);
    r.closed_form.xi2_opt = 3.0 * std::cbrt(4.0 * c) / std::cbrt(neta);
    r.closed_form.t_opt = x / gamma;
    r.closed_form.detuning_opt = 0.5 * kappa * std::sqrt(neta / c);
  } else {
    const double root = std::sqrt(10.0);
    r.closed_form.xi2_opt = std::sqrt(4.0 * (41.0 + 13.0 * root) / (3.0 * neta));
    r.closed_form.t_opt = (root - 1.0) / (6.0 * gamma);
    r.closed_form.detuning_opt = 0.5 * kappa * std::pow((root - 1.0) * neta / 12.0, 0.75);
  }

  ModelOptions model = opts;
  model.include_curvature = false;
  const DecoherenceChannels base{0.0, emission ? gamma : 0.0, emission ? 0.0 : gamma};
  auto evaluate = [&](double t, double detuning) {
    const CavityRates rates = far_detuned_rates(g, kappa, detuning);
    DecoherenceChannels ch = base;
    ch.collective = rates.gamma;
    return xi2_model(protocol, ch, atoms, rates.chi, 0.0, t, model).total();
  };
  const double t_ref = r.closed_form.t_opt;
  const double d_ref = r.closed_form.detuning_opt;
  auto objective = [&](std::span<const double> p) {
    if (std::abs(p[0]) > kNumericSpan || std::abs(p[1]) > kNumericSpan) return HUGE_VAL;
    return evaluate(t_ref * std::exp(p[0]), d_ref * std::exp(p[1]));
  };

  std::array<double, 2> best{0.0, 0.0};
  double best_value = objective(best);
  const int grid = 31;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const std::array<double, 2> p{-kGridSpan + 2.0 * kGridSpan * i / (grid - 1),
                                    -kGridSpan + 2.0 * kGridSpan * j / (grid - 1)};
      const double v = objective(p);
      if (v < best_value) {
        best_value = v;
        best = p;
      }
    }
  }
  const MinimumND m = nelder_mead(objective, {best[0], best[1]});
  r.numeric = {t_ref * std::exp(m.x[0]), d_ref * std::exp(m.x[1]), m.value, OptimumSource::Numeric};
  r.numeric_on_boundary = std::abs(m.x[0]) > kNumericSpan - 1e-3 || std::abs(m.x[1]) > kNumericSpan - 1e-3;
  compare(r);

  const double at_closed = evaluate(r.closed_form.t_opt, r.closed_form.detuning_opt);
  add_if_apart(r, "model xi2 at the closed-form point", r.closed_form.xi2_opt, at_closed, r.tolerance);
  return r;
}

std::string_view to_string(FluctuationRegime regime) {
  switch (regime) {
    case FluctuationRegime::IdealLimited: return "ideal_limited";
    case FluctuationRegime::Crossover: return "crossover";
    case FluctuationRegime::FluctuationLimited: return "fluctuation_limited";
  }
  return "unknown";
}

NumberFluctuationBound number_fluctuation_bound(double atoms, double sigma_n) {
  if (!(sigma_n >= 0.0)) throw std::invalid_argument("number_fluctuation_bound: sigma_n must be non-negative");
  if (!(atoms > 0.0)) throw std::invalid_argument("number_fluctuation_bound: atom number must be positive");
  NumberFluctuationBound b;
  b.delta_n = std::sqrt(2.0) * sigma_n;
  b.xi2_bound = b.delta_n / atoms;
  b.ratio = sigma_n / std::cbrt(atoms);
  b.ideal_xi2 = tss_ideal_optimum(atoms).xi2_opt;
  if (b.ratio < 0.5) {
    b.regime = FluctuationRegime::IdealLimited;
  } else if (b.ratio <= 2.0) {
    b.regime = FluctuationRegime::Crossover;
  } else {
    b.regime = FluctuationRegime::FluctuationLimited;
  }
  return b;
}

}  // namespace spinforge
