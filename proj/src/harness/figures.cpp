#include "spinforge/harness/figures.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>

#include "spinforge/analytic/optimum.hpp"
#include "spinforge/analytic/rates.hpp"
#include "spinforge/harness/run.hpp"
#include "spinforge/harness/svg.hpp"
#include "spinforge/harness/sweep.hpp"
#include "spinforge/numerics/minimize.hpp"

namespace spinforge {

using nlohmann::json;

namespace {

struct Row {
  std::string series;
  double x = 0.0;
  double xi2 = 0.0;
  double se = NAN;
};

class Figure {
 public:
  Figure(std::string name, const FigureOptions& opts) : opts_(opts) { report_.name = std::move(name); }

  const FigureOptions& options() const { return opts_; }
  LinePlot& plot() { return plot_; }
  FigureReport& report() { return report_; }

  void point(const std::string& series, double x, double xi2, double se = NAN) {
    rows_.push_back({series, x, xi2, se});
    auto it = std::find_if(plot_.series.begin(), plot_.series.end(), [&](const PlotSeries& s) { return s.name == series; });
    if (it == plot_.series.end()) {
      plot_.series.push_back({series, {}, {}});
      it = std::prev(plot_.series.end());
      it->dashed = series.find("model") != std::string::npos || series.find("closed") != std::string::npos ||
                   series.find("bound") != std::string::npos;
      it->markers = series.find("exact") != std::string::npos || series.find("twa") != std::string::npos ||
                    series.find("traj") != std::string::npos;
    }
    it->x.push_back(x);
    it->y.push_back(to_db(xi2));
  }

  void trace(const std::string& series, const EvolutionResult& r) {
    for (const auto& rec : r.records) {
      if (rec.t > 0.0) point(series, rec.t, rec.squeezing.xi2, rec.xi2_se);
    }
    if (auto it = std::find_if(plot_.series.begin(), plot_.series.end(), [&](const PlotSeries& s) { return s.name == series; });
        it != plot_.series.end()) {
      it->markers = false;
    }
  }

  void check(const std::string& name, double value, double target, double tol, const std::string& relation) {
    FigureCheck c{name, value, target, tol, relation, false};
    if (relation == "abs") c.pass = std::abs(value - target) <= tol;
    else if (relation == "rel") c.pass = std::abs(value / target - 1.0) <= tol;
    else if (relation == "ge") c.pass = value >= target;
    else if (relation == "le") c.pass = value <= target;
    else throw std::logic_error("unknown check relation " + relation);
    report_.checks.push_back(std::move(c));
  }

  void note(std::string text) { report_.notes.push_back(std::move(text)); }

  ScenarioOutcome run(const ScenarioConfig& c) {
    ScenarioOutcome o = compute_scenario(c);
    for (const auto& n : o.notices) {
      note(std::string(to_string(c.protocol)) + " N=" + std::to_string(c.atoms) + ": " + n);
    }
    return o;
  }

  ScenarioConfig scenario(Protocol p, int atoms, double gamma, int points = 150) const {
    ScenarioConfig c;
    c.protocol = p;
    c.atoms = atoms;
    c.gamma = gamma;
    c.seed = opts_.seed;
    c.jobs = opts_.jobs;
    c.n_traj = opts_.jump_trajectories;
    c.times.t_max = suggest_t_max(p, atoms, 1.0, gamma);
    c.times.points = points;
    return c;
  }

  FigureReport finish(const std::chrono::steady_clock::time_point& start) {
    report_.dir = opts_.out / report_.name;
    std::filesystem::create_directories(report_.dir);
    {
      std::ofstream csv(report_.dir / "data.csv");
      csv.precision(17);
      csv << "series,x,xi2,xi2_db,xi2_se\n";
      for (const auto& r : rows_) csv << r.series << ',' << r.x << ',' << r.xi2 << ',' << to_db(r.xi2) << ',' << r.se << '\n';
    }
    plot_.title = report_.name;
    plot_.write(report_.dir / "figure.svg");
    report_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json checks = json::array();
    for (const auto& c : report_.checks) checks.push_back(c.to_json());
    json j{{"figure", report_.name},
           {"checks", checks},
           {"all_pass", report_.all_pass()},
           {"notes", report_.notes},
           {"options",
            {{"seed", opts_.seed}, {"jump_trajectories", opts_.jump_trajectories}, {"twa_trajectories", opts_.twa_trajectories}}},
           {"provenance", provenance()},
           {"wall_time_s", report_.wall_seconds}};
    std::ofstream(report_.dir / "figure.json") << j.dump(2) << '\n';
    return report_;
  }

 private:
  FigureOptions opts_;
  FigureReport report_;
  LinePlot plot_;
  std::vector<Row> rows_;
};

double optimum_of(const ScenarioOutcome& o, Normalization norm = Normalization::Wineland) {
  return best_squeezing(o.result, norm).xi2;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> log_range(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1)));
  return v;
}

// perturbative TSS model with number fluctuations, minimized over ln t
double model_optimum(int atoms, double sigma_n) {
  const double t0 = tss_ideal_optimum(atoms).t_opt;
  const auto m = scan_and_refine(
      [&](double lt) { return xi2_model(Protocol::TSS, {}, atoms, 1.0, sigma_n, t0 * std::exp(lt)).total(); },
      std::log(1e-4), std::log(10.0));
  return m.value;
}

void fig2a(Figure& f) {
  constexpr int atoms = 1000;
  constexpr double gamma = 0.1;
  f.plot().x_label = "chi t";
  f.plot().y_label = "xi^2 (dB)";

  const auto oat = f.run(f.scenario(Protocol::OAT, atoms, gamma));
  const auto tss = f.run(f.scenario(Protocol::TSS, atoms, gamma));
  const auto oat_ideal = f.run(f.scenario(Protocol::OAT, atoms, 0.0));
  const auto tss_ideal = f.run(f.scenario(Protocol::TSS, atoms, 0.0));
  f.trace("OAT exact", oat.result);
  f.trace("TSS " + tss.result.backend, tss.result);
  f.trace("OAT ideal", oat_ideal.result);
  f.trace("TSS ideal", tss_ideal.result);
  for (const auto& [label, protocol, run] :
       {std::tuple{"OAT model", Protocol::OAT, &oat}, std::tuple{"TSS model", Protocol::TSS, &tss}}) {
    for (double t : run->result.times()) {
      if (t <= 0.0) continue;
      const double v = xi2_model(protocol, {gamma, 0.0, 0.0}, atoms, 1.0, 0.0, t).total();
      if (v > 0.0 && v < 10.0) f.point(label, t, v);
    }
  }
  f.note("TSS with collective emission runs on " + tss.result.backend + ", n_trunc 5, " +
         std::to_string(f.options().jump_trajectories) + " trajectories when unravelled");

  const double oat_db = to_db(optimum_of(oat)), tss_db = to_db(optimum_of(tss));
  const double bound_db = optimum_fixed_ratio(Protocol::OAT, atoms, gamma).closed_form.xi2_db();
  f.check("tss_below_oat_db", oat_db - tss_db, 10.0, 0.0, "ge");
  f.check("oat_optimum_db", oat_db, bound_db, 1.5, "abs");
}

void fig2inset(Figure& f) {
  const auto ratios = log_range(1e-3, 1e-1, 7);
  f.plot().log_x = true;
  f.plot().x_label = "Gamma / chi";
  f.plot().y_label = "optimal xi^2 (dB)";
  std::vector<double> n200, n1000;
  for (double r : ratios) {
    const double a = optimum_of(f.run(f.scenario(Protocol::OAT, 200, r)));
    const double b = optimum_of(f.run(f.scenario(Protocol::OAT, 1000, r)));
    const double c = optimum_of(f.run(f.scenario(Protocol::TSS, 100, r)));
    n200.push_back(a);
    n1000.push_back(b);
    f.point("OAT N=200 exact", r, a);
    f.point("OAT N=1000 exact", r, b);
    f.point("TSS N=100 exact", r, c);
  }
  for (double r : log_range(1e-3, 1e-1, 41)) {
    f.point("OAT closed form", r, optimum_fixed_ratio(Protocol::OAT, 1000, r).closed_form.xi2_opt);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) worst = std::max(worst, std::abs(to_db(n200[i]) - to_db(n1000[i])));
  f.check("oat_slope_N1000", loglog_slope(ratios, n1000), 2.0 / 3.0, 0.07, "abs");
  f.check("oat_slope_N200", loglog_slope(ratios, n200), 2.0 / 3.0, 0.07, "abs");
  f.check("oat_N200_vs_N1000_db", worst, 1.0, 0.0, "le");
}

void figS1(Figure& f) {
  f.plot().log_x = true;
  f.plot().x_label = "N";
  f.plot().y_label = "ideal optimal xi^2 (dB), fixed-length normalization";
  std::map<int, double> oat, tss;
  for (int n : {10, 20, 50, 100, 200, 500, 1000}) {
    oat[n] = optimum_of(f.run(f.scenario(Protocol::OAT, n, 0.0)), Normalization::Nominal);
    f.point("OAT exact", n, oat[n]);
  }
  for (int n : {20, 50, 100, 200, 400, 1000}) {
    tss[n] = optimum_of(f.run(f.scenario(Protocol::TSS, n, 0.0)), Normalization::Nominal);
    f.point("TSS exact", n, tss[n]);
  }
  for (int n : {10000, 100000}) {
    for (Protocol p : {Protocol::OAT, Protocol::TSS}) {
      ScenarioConfig c = f.scenario(p, n, 0.0);
      c.backend = Backend::Twa;
      c.n_traj = f.options().twa_trajectories / 10;
      f.point(std::string(to_string(p)) + " twa", n, optimum_of(f.run(c), Normalization::Nominal));
    }
  }
  for (double n : log_range(10, 1e5, 41)) {
    f.point("OAT closed form", n, oat_ideal_optimum(n).xi2_opt);
    f.point("TSS closed form", n, tss_ideal_optimum(n).xi2_opt);
  }
  f.note("points above N=1000 use TWA with " + std::to_string(f.options().twa_trajectories / 10) + " samples");

  double offset = 0.0;
  int count = 0;
  for (int n : {100, 200, 1000}) {
    offset += to_db(tss[n]) - to_db(oat[n]);
    ++count;
  }
  f.check("tss_minus_oat_db", offset / count, 1.2, 0.4, "abs");
  f.check("oat_N1000_over_closed_form", oat[1000], oat_ideal_optimum(1000).xi2_opt, 0.10, "rel");
  f.check("tss_N1000_over_closed_form", tss[1000], tss_ideal_optimum(1000).xi2_opt, 0.15, "rel");
}

void figS2(Figure& f) {
  constexpr int atoms = 200;
  f.plot().log_x = true;
  f.plot().x_label = "Gamma / chi";
  f.plot().y_label = "optimal xi^2 (dB)";
  double worst = 0.0;
  for (double r : {0.1, 0.3, 1.0}) {
    ScenarioConfig c = f.scenario(Protocol::TSS, atoms, r);
    const double full = optimum_of(f.run(c));
    c.sy_only = true;
    const double reduced = optimum_of(f.run(c));
    f.point("TSS full exact", r, full);
    f.point("TSS Sy-only exact", r, reduced);
    worst = std::max(worst, std::abs(to_db(full) - to_db(reduced)));
  }
  f.note("N = 200 instead of 1000 to keep the dense truncated master equation on a desk");
  f.check("full_vs_sy_only_db", worst, 0.3, 0.0, "le");
}

void figS3(Figure& f) {
  const double kappa = 2 * std::numbers::pi * 145e3, eta = 0.41;
  const double fundamental = 2 * std::numbers::pi * 1e-3, state_of_art = 2 * std::numbers::pi * 0.1;
  // g is pinned by the cooperativity at the fundamental rate; the other set keeps g and kappa
  const double g = std::sqrt(eta * kappa * fundamental / 4);
  f.plot().log_x = true;
  f.plot().x_label = "N";
  f.plot().y_label = "detuning-optimized xi^2 (dB)";
  struct Set {
    const char* label;
    double gamma;
    double tss_db, oat_db;
  };
  for (const Set& s : {Set{"state of the art", state_of_art, -6.2, -0.9}, Set{"fundamental", fundamental, -16.2, -7.6}}) {
    for (double n : log_range(1e2, 1e6, 41)) {
      const auto tss = optimum_over_detuning(Protocol::TSS, SingleParticleChannel::Emission, n, g, kappa, s.gamma);
      const auto oat = optimum_over_detuning(Protocol::OAT, SingleParticleChannel::Emission, n, g, kappa, s.gamma);
      const auto el = optimum_over_detuning(Protocol::OAT, SingleParticleChannel::Dephasing, n, g, kappa, s.gamma);
      f.point(std::string("TSS closed form, ") + s.label, n, tss.closed_form.xi2_opt);
      f.point(std::string("OAT closed form, ") + s.label, n, oat.closed_form.xi2_opt);
      f.point(std::string("OAT dephasing closed form, ") + s.label, n, el.closed_form.xi2_opt);
      f.point(std::string("TSS numeric, ") + s.label, n, tss.numeric.xi2_opt);
    }
    const auto tss = optimum_over_detuning(Protocol::TSS, SingleParticleChannel::Emission, 1e5, g, kappa, s.gamma);
    const auto oat = optimum_over_detuning(Protocol::OAT, SingleParticleChannel::Emission, 1e5, g, kappa, s.gamma);
    const std::string tag = s.gamma == fundamental ? "fundamental" : "state_of_art";
    f.check("tss_N1e5_db_" + tag, tss.closed_form.xi2_db(), s.tss_db, 0.15, "abs");
    f.check("oat_N1e5_db_" + tag, oat.closed_form.xi2_db(), s.oat_db, 0.15, "abs");
    f.check("tss_numeric_confirms_" + tag, tss.closed_form.xi2_opt, tss.numeric.xi2_opt, tss.tolerance, "rel");
    f.check("oat_numeric_confirms_" + tag, oat.closed_form.xi2_opt, oat.numeric.xi2_opt, oat.tolerance, "rel");
  }
  f.note("analytic closed forms over the full N range; numeric curves minimize the same model over (t, detuning)");
}

void figS4(Figure& f) {
  f.plot().log_x = true;
  f.plot().x_label = "delta N";
  f.plot().y_label = "optimal xi^2 (dB)";
  const std::vector<double> multiples = {0.1, 0.25, 0.5, 1, 2, 5, 10, 20, 50, 100};
  for (int atoms : {10000, 100000}) {
    const double scale = std::cbrt(static_cast<double>(atoms));
    const std::string tag = "N=" + std::to_string(atoms);
    auto run = [&](double delta_n) {
      ScenarioConfig c = f.scenario(Protocol::TSS, atoms, 0.0, 200);
      c.backend = Backend::Twa;
      c.n_traj = f.options().twa_trajectories;
      c.sigma_n = delta_n / std::sqrt(2.0);
      c.times.t_min = c.times.t_max * 1e-3;
      c.times.log_spacing = true;
      const auto o = f.run(c);
      const auto best = best_squeezing(o.result);
      return std::pair{best.xi2, o.result.records[best.index].xi2_se};
    };
    const double ideal = run(0.0).first;
    double flat = 0.0, tail = 0.0;
    for (double k : multiples) {
      const double dn = k * scale;
      const auto [xi2, se] = run(dn);
      f.point("TSS twa " + tag, dn, xi2, se);
      f.point("delta N / N bound " + tag, dn, dn / atoms);
      f.point("TSS model " + tag, dn, model_optimum(atoms, dn / std::sqrt(2.0)));
      f.point("TSS ideal " + tag, dn, ideal);
      if (k <= 1.0) flat = std::max(flat, std::abs(to_db(xi2) - to_db(ideal)));
      if (k >= 10.0) tail = std::max(tail, std::abs(xi2 / (dn / atoms) - 1.0));
    }
    f.check("flat_below_cbrtN_db_" + tag, flat, 1.0, 0.0, "le");
    f.check("bound_above_10cbrtN_rel_" + tag, tail, 0.2, 0.0, "le");
  }
  f.note("TWA with " + std::to_string(f.options().twa_trajectories) +
         " samples; N = 1e5 stands in for the largest size, delta N = sqrt(2) sigma_n");
}

void figS5(Figure& f) {
  constexpr int atoms = 200;
  constexpr double gamma = 0.1;
  f.plot().x_label = "delta N";
  f.plot().y_label = "optimal xi^2 (dB)";
  const double scale = std::cbrt(static_cast<double>(atoms));
  double advantage = HUGE_VAL;
  for (double k : {0.0, 1.0, 2.0}) {
    const double dn = k * scale;
    ScenarioConfig tss = f.scenario(Protocol::TSS, atoms, gamma);
    tss.n_trunc = 4;
    tss.sigma_n = dn / std::sqrt(2.0);
    ScenarioConfig oat = f.scenario(Protocol::OAT, atoms, gamma);
    oat.sigma_n = tss.sigma_n;
    const double t = optimum_of(f.run(tss)), o = optimum_of(f.run(oat));
    f.point("TSS exact", dn, t);
    f.point("OAT exact", dn, o);
    if (k <= 1.0) advantage = std::min(advantage, to_db(o) - to_db(t));
  }
  f.note("exact runs averaged over a 3-point Gauss-Hermite grid of ensemble sizes per ensemble, TSS n_trunc 4");
  f.check("tss_advantage_db", advantage, 5.0, 0.0, "ge");
}

}  // namespace

json FigureCheck::to_json() const {
  return {{"name", name}, {"value", value}, {"target", target}, {"tolerance", tolerance}, {"relation", relation},
          {"pass", pass}};
}

bool FigureReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const FigureCheck& c) { return c.pass; });
}

std::vector<std::string_view> figure_names() { return {"fig2a", "fig2inset", "figS1", "figS2", "figS3", "figS4", "figS5"}; }

FigureReport preset_figure(std::string_view name, const FigureOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  Figure f(std::string(name), options);
  if (name == "fig2a") fig2a(f);
  else if (name == "fig2inset") fig2inset(f);
  else if (name == "figS1") figS1(f);
  else if (name == "figS2") figS2(f);
  else if (name == "figS3") figS3(f);
  else if (name == "figS4") figS4(f);
  else if (name == "figS5") figS5(f);
  else throw std::invalid_argument("unknown figure '" + std::string(name) + "'");
  return f.finish(start);
}

}  // namespace spinforge
