#include "spinforge/harness/run.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "spinforge/dicke/evolution.hpp"
#include "spinforge/harness/svg.hpp"
#include "spinforge/twa/twa.hpp"

#ifndef SPINFORGE_VERSION
#define SPINFORGE_VERSION "unknown"
#endif

namespace spinforge {

using nlohmann::json;

namespace {

constexpr int kOatBandCap = 1000;
constexpr int kOatTrajectoryCap = 20000;
constexpr int kTssExactCap = 2000;
constexpr int kTssTrajectoryCap = 5000;
constexpr std::size_t kDefaultTrajectories = 256;
constexpr std::size_t kDefaultTwaTrajectories = 10000;

struct Quadrature {
  std::vector<double> nodes, weights;
};

// probabilists' Gauss-Hermite rules, weights normalized to one
Quadrature hermite(int n) {
  switch (n) {
    case 1: return {{0.0}, {1.0}};
    case 3: return {{-std::sqrt(3.0), 0.0, std::sqrt(3.0)}, {1.0 / 6, 2.0 / 3, 1.0 / 6}};
    case 5: {
      const double a = 2.856970013872806, b = 1.355626179974266;
      const double wa = 0.011257411327720691, wb = 0.22207592200561266;
      return {{-a, -b, 0.0, b, a}, {wa, wb, 8.0 / 15, wb, wa}};
    }
    default: throw std::invalid_argument("hermite: supported orders are 1, 3 and 5");
  }
}

bool single_particle(const ScenarioConfig& c) { return c.gamma_s > 0.0 || c.gamma_el > 0.0; }

[[noreturn]] void unsupported(const std::string& what) { throw ConfigError("field 'backend': " + what); }

Backend resolve(const ScenarioConfig& c, std::vector<std::string>& notices) {
  const double gamma = c.effective_gamma();
  if (c.backend == Backend::Analytic) return Backend::Analytic;
  if (single_particle(c)) {
    if (c.backend == Backend::Exact || c.backend == Backend::Trajectories) {
      unsupported("single-particle rates need the twa or analytic backend");
    }
    if (gamma > 0.0) unsupported("collective emission together with single-particle rates is only modelled analytically");
    return Backend::Twa;
  }
  if (c.backend == Backend::Twa) {
    if (gamma > 0.0) unsupported("twa has no collective emission channel");
    return Backend::Twa;
  }
  auto downgrade = [&](Backend from, Backend to, const std::string& why) {
    notices.push_back("backend " + std::string(to_string(from)) + " -> " + std::string(to_string(to)) + ": " + why);
    return to;
  };
  const Backend wanted = c.backend == Backend::Auto ? Backend::Exact : c.backend;
  if (c.protocol == Protocol::OAT) {
    if (wanted == Backend::Exact && c.atoms <= kOatBandCap) return Backend::Exact;
    if (c.atoms <= kOatTrajectoryCap) {
      return wanted == Backend::Exact ? downgrade(wanted, Backend::Trajectories, "N above the band-solver cap")
                                      : Backend::Trajectories;
    }
    if (gamma > 0.0) unsupported("N too large for trajectories and twa has no collective emission");
    return downgrade(wanted, Backend::Twa, "N above the trajectory cap");
  }
  const int cap = wanted == Backend::Exact ? kTssExactCap : kTssTrajectoryCap;
  if (c.atoms <= cap) return wanted;
  if (wanted == Backend::Exact && c.atoms <= kTssTrajectoryCap && gamma > 0.0) {
    return downgrade(wanted, Backend::Trajectories, "N above the exact cap");
  }
  if (gamma > 0.0) unsupported("N too large for trajectories and twa has no collective emission");
  return downgrade(wanted, Backend::Twa, "N above the " + std::string(to_string(wanted)) + " cap");
}

EvolutionResult run_exact_point(const ScenarioConfig& c, Backend backend, std::span<const double> times, int n1,
                                int n2, std::vector<std::string>& notices) {
  const double chi = c.effective_chi(), gamma = c.effective_gamma();
  const std::size_t n_traj = c.n_traj ? c.n_traj : kDefaultTrajectories;
  if (c.protocol == Protocol::OAT) {
    if (backend == Backend::Exact) return evolve_oat_master(n1, chi, gamma, times);
    LindbladSpec spec{HamiltonianKind::OAT, chi, gamma, {}};
    if (gamma > 0.0) spec.jumps.push_back(JumpKind::CollectiveEmission);
    const DickeBasis basis{SpinLength::from_atoms(n1)};
    TrajectoryOptions traj;
    traj.n_traj = static_cast<int>(n_traj);
    traj.seed = c.seed;
    traj.jobs = c.jobs;
    return trajectory_unravel(spec, initial_state(spec, basis), times, traj);
  }
  TssOptions o;
  o.n_trunc = c.n_trunc;
  o.variant = c.sy_only ? TssVariant::SyOnly : TssVariant::Full;
  o.atoms_first = n1;
  o.atoms_second = n2;
  o.trajectories.n_traj = static_cast<int>(n_traj);
  o.trajectories.seed = c.seed;
  o.trajectories.jobs = c.jobs;
  o.backend = backend == Backend::Trajectories ? TssBackend::Trajectories : TssBackend::Auto;
  if (gamma == 0.0 && backend == Backend::Exact) return evolve_tss_unitary_truncated(n1 + n2, chi, times, o);
  auto res = evolve_tss_master_truncated(n1 + n2, chi, gamma, times, o);
  if (backend == Backend::Exact && res.backend != "liouville") {
    const std::string note = "backend ed -> traj: dense Liouville working set above the memory budget";
    if (std::find(notices.begin(), notices.end(), note) == notices.end()) notices.push_back(note);
  }
  return res;
}

EvolutionResult run_twa_backend(const ScenarioConfig& c, std::span<const double> times) {
  WignerSamplingSpec spec;
  spec.atoms = c.atoms;
  spec.protocol = c.protocol;
  spec.sigma_n = c.sigma_n;
  spec.n_traj = c.n_traj ? c.n_traj : kDefaultTwaTrajectories;
  spec.seed = c.seed;
  MeanFieldParams p;
  p.chi = c.effective_chi();
  p.gamma_s = c.gamma_s;
  p.gamma_el = c.gamma_el;
  TwaIntegratorOptions integ;
  integ.jobs = c.jobs;
  auto res = run_twa(spec, p, times, integ);
  for (auto& w : validity_warnings(p, times)) res.warnings.push_back(std::move(w));
  return res;
}

std::vector<PerturbativePrediction> run_analytic(const ScenarioConfig& c, std::span<const double> times) {
  const DecoherenceChannels channels{c.effective_gamma(), c.gamma_s, c.gamma_el};
  std::vector<PerturbativePrediction> rows;
  rows.reserve(times.size());
  for (double t : times) {
    if (t > 0.0) rows.push_back(xi2_model(c.protocol, channels, c.atoms, c.effective_chi(), c.sigma_n, t));
  }
  return rows;
}

std::string folder_name(const ScenarioConfig& c) {
  json j = to_json(c);
  j.erase("out");
  j.erase("jobs");
  const std::string stem = c.name.empty() ? std::string(c.protocol == Protocol::OAT ? "oat" : "tss") + "_N" +
                                                std::to_string(c.atoms)
                                          : c.name;
  return stem + "_" + content_hash(j).substr(0, 8);
}

void fill_optimum(RunSummary& s, const ScenarioOutcome& o) {
  if (o.backend == Backend::Analytic) {
    double best = HUGE_VAL;
    for (const auto& row : o.model) {
      const double v = row.total();
      if (v < best) {
        best = v;
        s.t_opt = row.t;
      }
    }
    s.xi2_opt = best;
    s.xi2_opt_db = 10.0 * std::log10(best);
    s.xi2_nominal_opt_db = s.xi2_opt_db;
    s.xi2_final_db = o.model.empty() ? NAN : 10.0 * std::log10(o.model.back().total());
    s.optimum_at_boundary = !o.model.empty() && (s.t_opt == o.model.front().t || s.t_opt == o.model.back().t);
    return;
  }
  const auto& r = o.result;
  if (r.records.empty()) return;
  const auto w = best_squeezing(r, Normalization::Wineland);
  const auto n = best_squeezing(r, Normalization::Nominal);
  s.t_opt = w.t;
  s.xi2_opt = w.xi2;
  s.xi2_opt_db = w.xi2_db;
  s.xi2_nominal_opt_db = n.xi2_db;
  s.optimum_at_boundary = w.at_boundary;
  s.xi2_final_db = r.records.back().squeezing.xi2_db;
}

void plot_series(const ScenarioOutcome& o, const ScenarioConfig& c, const std::filesystem::path& path) {
  LinePlot plot;
  plot.title = std::string(to_string(c.protocol)) + ", N = " + std::to_string(c.atoms);
  plot.x_label = c.cavity ? "t" : "chi t";
  plot.y_label = "xi^2 (dB)";
  if (o.backend == Backend::Analytic) {
    PlotSeries s{"model", {}, {}};
    for (const auto& row : o.model) {
      s.x.push_back(row.t);
      s.y.push_back(10.0 * std::log10(row.total()));
    }
    plot.series.push_back(std::move(s));
  } else {
    PlotSeries w{"Wineland", {}, {}}, n{"fixed length", {}, {}, true};
    for (const auto& r : o.result.records) {
      w.x.push_back(r.t);
      w.y.push_back(r.squeezing.xi2_db);
      n.x.push_back(r.t);
      n.y.push_back(r.squeezing.xi2_nominal_db);
    }
    plot.series.push_back(std::move(w));
    plot.series.push_back(std::move(n));
  }
  plot.write(path);
}

}  // namespace

EvolutionResult fluctuation_mixture(Protocol protocol, int atoms, double sigma_n, int nodes,
                                    const std::function<EvolutionResult(int, int)>& run) {
  const Quadrature q = hermite(nodes);
  // rounding can merge nodes; identical size pairs run once
  std::map<std::pair<int, int>, double> weights;
  if (protocol == Protocol::OAT) {
    const double sigma_total = std::sqrt(2.0) * sigma_n;
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
      const int n = atoms + static_cast<int>(std::lround(sigma_total * q.nodes[k]));
      if (n < 1) throw std::domain_error("fluctuation_mixture: sigma_n too large, an atom number drops below 1");
      weights[{n, 0}] += q.weights[k];
    }
  } else {
    const int half = atoms / 2;
    for (std::size_t a = 0; a < q.nodes.size(); ++a) {
      for (std::size_t b = 0; b < q.nodes.size(); ++b) {
        const int n1 = half + static_cast<int>(std::lround(sigma_n * q.nodes[a]));
        const int n2 = half + static_cast<int>(std::lround(sigma_n * q.nodes[b]));
        if (n1 < 1 || n2 < 1) throw std::domain_error("fluctuation_mixture: sigma_n too large, an ensemble empties");
        weights[{n1, n2}] += q.weights[a] * q.weights[b];
      }
    }
  }

  EvolutionResult mix;
  json parts = json::array();
  bool first = true;
  for (const auto& [sizes, w] : weights) {
    EvolutionResult r = run(sizes.first, sizes.second);
    parts.push_back({{"n1", sizes.first}, {"n2", sizes.second}, {"weight", w}, {"backend", r.backend}});
    if (first) {
      mix.backend = r.backend + "_mixture";
      mix.axes = r.axes;
      mix.time_unit = r.time_unit;
      mix.records.resize(r.records.size());
      for (std::size_t i = 0; i < r.records.size(); ++i) mix.records[i].t = r.records[i].t;
      first = false;
    }
    mix.converged = mix.converged && r.converged;
    for (auto& msg : r.warnings) mix.warnings.push_back(std::move(msg));
    for (std::size_t i = 0; i < r.records.size(); ++i) {
      auto& m = mix.records[i];
      const auto& x = r.records[i];
      m.mean += w * x.mean;
      m.second += w * x.second;
      m.lab_sz += w * x.lab_sz;
      m.emission += w * x.emission;
      m.energy += w * x.energy;
      m.trace_drift = std::max(m.trace_drift, x.trace_drift);
    }
  }
  mix.atoms = atoms;
  mix.metadata["fluctuation_nodes"] = parts;
  mix.metadata["sigma_n"] = sigma_n;
  attach_squeezing(mix);
  return mix;
}

ScenarioOutcome compute_scenario(const ScenarioConfig& c) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioOutcome o;
  o.backend = resolve(c, o.notices);
  const std::vector<double> times = c.times.resolve();
  if (times.empty()) throw ConfigError("field 'times': empty time grid");
  switch (o.backend) {
    case Backend::Analytic:
      o.model = run_analytic(c, times);
      if (o.model.empty()) throw ConfigError("field 'times': the analytic backend needs times above zero");
      break;
    case Backend::Twa: o.result = run_twa_backend(c, times); break;
    default:
      if (c.sigma_n > 0.0) {
        o.result = fluctuation_mixture(c.protocol, c.atoms, c.sigma_n, c.fluctuation_nodes, [&](int n1, int n2) {
          return run_exact_point(c, o.backend, times, n1, n2, o.notices);
        });
      } else {
        const int n1 = c.protocol == Protocol::OAT ? c.atoms : c.atoms / 2;
        const int n2 = c.protocol == Protocol::OAT ? 0 : c.atoms / 2;
        o.result = run_exact_point(c, o.backend, times, n1, n2, o.notices);
      }
  }
  o.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return o;
}

json RunSummary::to_json() const {
  return {{"dir", dir.string()},
          {"backend", backend},
          {"ok", ok},
          {"error", error},
          {"t_opt", t_opt},
          {"xi2_opt", xi2_opt},
          {"xi2_opt_db", xi2_opt_db},
          {"xi2_nominal_opt_db", xi2_nominal_opt_db},
          {"xi2_final_db", xi2_final_db},
          {"optimum_at_boundary", optimum_at_boundary},
          {"notices", notices}};
}

RunSummary RunSummary::from_json(const json& j) {
  RunSummary s;
  s.dir = j.at("dir").get<std::string>();
  s.backend = j.at("backend").get<std::string>();
  s.ok = j.at("ok").get<bool>();
  s.error = j.at("error").get<std::string>();
  auto num = [&](const char* k) { return j.at(k).is_number() ? j.at(k).get<double>() : NAN; };
  s.t_opt = num("t_opt");
  s.xi2_opt = num("xi2_opt");
  s.xi2_opt_db = num("xi2_opt_db");
  s.xi2_nominal_opt_db = num("xi2_nominal_opt_db");
  s.xi2_final_db = num("xi2_final_db");
  s.optimum_at_boundary = j.at("optimum_at_boundary").get<bool>();
  s.notices = j.at("notices").get<std::vector<std::string>>();
  return s;
}

json provenance() {
  return {{"spinforge_version", SPINFORGE_VERSION},
          {"compiler", __VERSION__},
          {"cxx_standard", static_cast<long>(__cplusplus)},
          {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
          {"nlohmann_json_version", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

void write_model_csv(std::ostream& out, const std::vector<PerturbativePrediction>& rows) {
  std::vector<std::string> labels;
  for (const auto& row : rows) {
    for (const auto& term : row.terms) {
      if (std::find(labels.begin(), labels.end(), term.label) == labels.end()) labels.push_back(term.label);
    }
  }
  out << "t,beta";
  for (const auto& l : labels) out << ',' << l;
  out << ",total,total_db,valid\n";
  const auto old = out.precision(17);
  for (const auto& row : rows) {
    out << row.t << ',' << row.beta;
    for (const auto& l : labels) out << ',' << row.term(l);
    out << ',' << row.total() << ',' << 10.0 * std::log10(row.total()) << ',' << (row.validity.all() ? 1 : 0) << '\n';
  }
  out.precision(old);
}

RunSummary run_scenario(const ScenarioConfig& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  RunSummary s;
  s.dir = dir;
  {
    std::ofstream cfg(dir / "config.json");
    cfg << to_json(c).dump(2) << '\n';
  }
  json meta;
  meta["provenance"] = provenance();
  meta["backend_requested"] = std::string(to_string(c.backend));
  try {
    const ScenarioOutcome o = compute_scenario(c);
    s.backend = o.backend == Backend::Analytic ? "analytic" : o.result.backend;
    s.notices = o.notices;
    if (o.backend == Backend::Analytic) {
      std::ofstream csv(dir / "model.csv");
      write_model_csv(csv, o.model);
    } else {
      std::ofstream csv(dir / "series.csv");
      o.result.write_csv(csv);
      meta["solver"] = o.result.sidecar();
    }
    fill_optimum(s, o);
    plot_series(o, c, dir / "xi2.svg");
    meta["wall_time_s"] = o.wall_seconds;
    s.ok = true;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    s.ok = false;
    s.error = e.what();
  }
  meta["backend"] = s.backend;
  meta["notices"] = s.notices;
  meta["summary"] = s.to_json();
  std::ofstream out(dir / "metadata.json");
  out << meta.dump(2) << '\n';
  return s;
}

RunSummary run_scenario(const ScenarioConfig& c) { return run_scenario(c, std::filesystem::path(c.out) / folder_name(c)); }

}  // namespace spinforge
