#include "spinforge/harness/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "spinforge/analytic/optimum.hpp"
#include "spinforge/numerics/parallel.hpp"

namespace spinforge {

using nlohmann::json;

namespace {

SweepAxis axis_from_string(const std::string& s) {
  if (s == "gamma_over_chi") return SweepAxis::GammaOverChi;
  if (s == "atoms" || s == "N") return SweepAxis::Atoms;
  if (s == "delta_n") return SweepAxis::DeltaN;
  if (s == "t") return SweepAxis::Time;
  if (s == "detuning") return SweepAxis::Detuning;
  throw ConfigError("field 'axis': expected gamma_over_chi, atoms, delta_n, t or detuning");
}

json point_key(const json& scenario) {
  json j = scenario;
  j.erase("out");
  j.erase("jobs");
  return j;
}

}  // namespace

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::GammaOverChi: return "gamma_over_chi";
    case SweepAxis::Atoms: return "atoms";
    case SweepAxis::DeltaN: return "delta_n";
    case SweepAxis::Time: return "t";
    case SweepAxis::Detuning: return "detuning";
  }
  return "unknown";
}

SweepSpec sweep_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("sweep spec must be an object");
  static const char* known[] = {"name", "axis", "values", "range", "spacing", "auto_time", "jobs", "out",
                                "base", "overrides"};
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known)) {
      throw ConfigError("field '" + key + "': unknown key");
    }
  }
  SweepSpec s;
  if (j.contains("name")) s.name = j["name"].get<std::string>();
  if (!j.contains("axis") || !j["axis"].is_string()) throw ConfigError("field 'axis': required string");
  s.axis = axis_from_string(j["axis"].get<std::string>());
  if (j.contains("values") == j.contains("range")) throw ConfigError("field 'values': give exactly one of values or range");
  if (j.contains("values")) {
    if (!j["values"].is_array()) throw ConfigError("field 'values': expected an array of numbers");
    for (const auto& v : j["values"]) {
      if (!v.is_number()) throw ConfigError("field 'values': expected an array of numbers");
      s.values.push_back(v.get<double>());
    }
  } else {
    const json& r = j["range"];
    if (!r.is_array() || r.size() != 3 || !r[0].is_number() || !r[1].is_number() || !r[2].is_number_integer()) {
      throw ConfigError("field 'range': expected [start, stop, count]");
    }
    const double a = r[0].get<double>(), b = r[1].get<double>();
    const int n = r[2].get<int>();
    const std::string spacing = j.value("spacing", std::string("linear"));
    if (spacing != "linear" && spacing != "log") throw ConfigError("field 'spacing': expected linear or log");
    if (n < 1) throw ConfigError("field 'range': count must be at least 1");
    if (spacing == "log" && !(a > 0.0 && b > 0.0)) throw ConfigError("field 'range': log spacing needs positive ends");
    for (int i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      s.values.push_back(spacing == "log" ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
  }
  if (s.values.empty()) throw ConfigError("field 'values': a sweep needs at least one point");
  if (!j.contains("base") || !j["base"].is_object()) throw ConfigError("field 'base': required section");
  s.base = j["base"];
  if (j.contains("overrides")) {
    if (!j["overrides"].is_object()) throw ConfigError("field 'overrides': expected sections keyed by point index");
    for (const auto& [key, val] : j["overrides"].items()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(key);
      } catch (const std::exception&) {
        throw ConfigError("field 'overrides." + key + "': index expected");
      }
      if (idx >= s.values.size()) throw ConfigError("field 'overrides." + key + "': no such point");
      if (!val.is_object()) throw ConfigError("field 'overrides." + key + "': expected a section");
      s.overrides[idx] = val;
    }
  }
  s.auto_time = j.value("auto_time", false);
  s.jobs = j.value("jobs", 0);
  s.out = j.value("out", std::string("sweeps"));
  // validate every point up front so a bad spec fails before any work
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    try {
      scenario_from_json(point_config(s, i));
    } catch (const ConfigError& e) {
      throw ConfigError("point " + std::to_string(i) + ": " + e.what());
    }
  }
  return s;
}

double suggest_t_max(Protocol protocol, int atoms, double chi, double gamma, double sigma_n) {
  const double ratio = gamma / std::abs(chi);
  double t = protocol == Protocol::OAT ? oat_ideal_optimum(atoms).t_opt : tss_ideal_optimum(atoms).t_opt;
  if (ratio > 0.0 && protocol == Protocol::OAT) t = std::max(t, optimum_fixed_ratio(protocol, atoms, ratio).numeric.t_opt);
  if (ratio > 0.0 && protocol == Protocol::TSS) t = std::max(t, optimum_fixed_ratio(protocol, atoms, ratio).numeric.t_opt);
  (void)sigma_n;  // fluctuations only move the optimum earlier
  return 3.0 * t / std::abs(chi);
}

json point_config(const SweepSpec& spec, std::size_t i) {
  json j = spec.base;
  const double v = spec.values.at(i);
  switch (spec.axis) {
    case SweepAxis::GammaOverChi:
      if (j.contains("cavity")) throw ConfigError("field 'axis': gamma_over_chi needs chi/gamma, not a cavity");
      j["gamma"] = v * j.value("chi", 1.0);
      break;
    case SweepAxis::Atoms: j["atoms"] = static_cast<long long>(std::llround(v)); break;
    case SweepAxis::DeltaN: j["sigma_n"] = v / std::sqrt(2.0); break;
    case SweepAxis::Time:
      if (j.contains("times")) throw ConfigError("field 'axis': t sweeps need a t_max grid, not times");
      j["t_max"] = v;
      break;
    case SweepAxis::Detuning:
      if (!j.contains("cavity")) throw ConfigError("field 'axis': detuning sweeps need a cavity section");
      j["cavity"]["detuning"] = v;
      break;
  }
  if (auto it = spec.overrides.find(i); it != spec.overrides.end()) {
    for (const auto& [key, val] : it->second.items()) j[key] = val;
  }
  if (spec.auto_time && spec.axis != SweepAxis::Time && !j.contains("times")) {
    const ScenarioConfig probe = [&] {
      json k = j;
      if (!k.contains("t_max")) k["t_max"] = 1.0;
      return scenario_from_json(k);
    }();
    j["t_max"] = suggest_t_max(probe.protocol, probe.atoms, probe.effective_chi(), probe.effective_gamma(), probe.sigma_n);
  }
  return j;
}

bool SweepOutcome::all_ok() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.summary.ok; });
}

void SweepOutcome::write_csv(std::ostream& out) const {
  out << "index," << to_string(axis)
      << ",hash,status,backend,t_opt,xi2_opt,xi2_opt_db,xi2_nominal_opt_db,xi2_final_db,at_boundary,reused,error\n";
  const auto old = out.precision(17);
  for (const auto& p : points) {
    const auto& s = p.summary;
    std::string err = s.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << p.index << ',' << p.value << ',' << p.hash << ',' << (s.ok ? "ok" : "failed") << ',' << s.backend << ','
        << s.t_opt << ',' << s.xi2_opt << ',' << s.xi2_opt_db << ',' << s.xi2_nominal_opt_db << ',' << s.xi2_final_db
        << ',' << (s.optimum_at_boundary ? 1 : 0) << ',' << (p.reused ? 1 : 0) << ',' << err << '\n';
  }
  out.precision(old);
}

SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "points");
  SweepOutcome outcome;
  outcome.dir = dir;
  outcome.axis = spec.axis;
  outcome.points.resize(spec.values.size());
  {
    std::ofstream s(dir / "sweep.json");
    json j{{"name", spec.name}, {"axis", std::string(to_string(spec.axis))}, {"values", spec.values},
           {"base", spec.base}, {"auto_time", spec.auto_time}};
    for (const auto& [i, o] : spec.overrides) j["overrides"][std::to_string(i)] = o;
    s << j.dump(2) << '\n';
  }

  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int jobs = spec.jobs > 0 ? spec.jobs : hw;
  std::mutex index_mu;
  std::ofstream index(dir / "index.jsonl", std::ios::app);

  parallel_for(spec.values.size(), jobs, [&](std::size_t i) {
    SweepPoint& p = outcome.points[i];
    p.index = i;
    p.value = spec.values[i];
    json cfg_json = point_config(spec, i);
    if (jobs > 1) cfg_json["jobs"] = 1;
    p.hash = content_hash(point_key(cfg_json));
    const auto point_dir = dir / "points" / p.hash;
    const auto summary_path = point_dir / "summary.json";
    if (std::filesystem::exists(summary_path)) {
      std::ifstream in(summary_path);
      const json done = json::parse(in, nullptr, false);
      if (!done.is_discarded() && done.value("ok", false)) {
        p.summary = RunSummary::from_json(done);
        p.reused = true;
      }
    }
    if (!p.reused) {
      try {
        p.summary = run_scenario(scenario_from_json(cfg_json), point_dir);
      } catch (const std::exception& e) {
        p.summary.ok = false;
        p.summary.dir = point_dir;
        p.summary.error = e.what();
      }
      std::filesystem::create_directories(point_dir);
      std::ofstream out(summary_path);
      out << p.summary.to_json().dump(2) << '\n';
    }
    std::lock_guard lock(index_mu);
    index << json{{"index", i}, {"value", p.value}, {"hash", p.hash}, {"ok", p.summary.ok}, {"reused", p.reused}}.dump()
          << '\n';
  });

  std::ofstream csv(dir / "aggregate.csv");
  outcome.write_csv(csv);
  return outcome;
}

SweepOutcome run_sweep(const SweepSpec& spec) { return run_sweep(spec, std::filesystem::path(spec.out) / spec.name); }

}  // namespace spinforge
