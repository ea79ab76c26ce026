#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spinforge/analytic/optimum.hpp"
#include "spinforge/harness/figures.hpp"
#include "spinforge/harness/run.hpp"
#include "spinforge/harness/sweep.hpp"

using namespace spinforge;
using nlohmann::json;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<std::string> backend;

  void apply(json& j) const {
    if (seed) j["seed"] = *seed;
    if (jobs) j["jobs"] = *jobs;
    if (out) j["out"] = *out;
    if (backend) j["backend"] = *backend;
  }
};

// a file path, or inline key=value pairs
json read_params(const std::vector<std::string>& args) {
  if (args.size() == 1 && args[0].find('=') == std::string::npos) return load_config_file(args[0]);
  std::string text;
  for (const auto& a : args) text += a + '\n';
  return parse_config_text(text);
}

int cmd_run(const std::string& path, const Overrides& ov) {
  json j = load_config_file(path);
  ov.apply(j);
  const RunSummary s = run_scenario(scenario_from_json(j));
  std::cout << s.to_json().dump(2) << '\n';
  return s.ok ? 0 : 1;
}

int cmd_sweep(const std::string& path, const Overrides& ov) {
  json j = load_config_file(path);
  if (ov.jobs) j["jobs"] = *ov.jobs;
  if (ov.out) j["out"] = *ov.out;
  if (j.contains("base")) {
    if (ov.seed) j["base"]["seed"] = *ov.seed;
    if (ov.backend) j["base"]["backend"] = *ov.backend;
  }
  const SweepSpec spec = sweep_from_json(j);
  const SweepOutcome outcome = run_sweep(spec);
  outcome.write_csv(std::cout);
  std::cerr << "sweep written to " << outcome.dir.string() << '\n';
  return outcome.all_ok() ? 0 : 1;
}

int cmd_figure(const std::vector<std::string>& names, const Overrides& ov, std::size_t jump_traj, std::size_t twa_traj) {
  FigureOptions opts;
  if (ov.seed) opts.seed = *ov.seed;
  if (ov.jobs) opts.jobs = *ov.jobs;
  opts.out = ov.out.value_or("figures");
  opts.jump_trajectories = jump_traj;
  opts.twa_trajectories = twa_traj;
  std::vector<std::string> todo = names;
  if (todo.size() == 1 && todo[0] == "all") {
    todo.clear();
    for (auto n : figure_names()) todo.emplace_back(n);
  }
  int status = 0;
  for (const auto& name : todo) {
    try {
      const FigureReport r = preset_figure(name, opts);
      std::printf("%s: %s (%.1f s)\n", r.name.c_str(), r.dir.string().c_str(), r.wall_seconds);
      for (const auto& c : r.checks) {
        std::printf("  %s %s value=%.6g target=%.6g tol=%.3g (%s)\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                    c.target, c.tolerance, c.relation.c_str());
      }
      for (const auto& n : r.notes) std::printf("  note: %s\n", n.c_str());
    } catch (const std::exception& e) {
      std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
      status = 1;
    }
  }
  return status;
}

int cmd_model(const std::vector<std::string>& args, const Overrides& ov) {
  json j = read_params(args);
  ov.apply(j);
  j["backend"] = "analytic";
  const ScenarioConfig c = scenario_from_json(j);
  const ScenarioOutcome o = compute_scenario(c);
  write_model_csv(std::cout, o.model);
  const double ratio = c.effective_gamma() / std::abs(c.effective_chi());
  if (c.gamma_s == 0.0 && c.gamma_el == 0.0 && c.sigma_n == 0.0) {
    const auto r = optimum_fixed_ratio(c.protocol, c.atoms, ratio);
    std::cerr << "closed-form optimum: chi t = " << r.closed_form.t_opt << ", xi2 = " << r.closed_form.xi2_opt << " ("
              << r.closed_form.xi2_db() << " dB); numeric " << r.numeric.xi2_opt << '\n';
    for (const auto& d : r.discrepancies) {
      std::cerr << "discrepancy " << d.quantity << ": stated " << d.stated << ", derived " << d.derived << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinforge: spin squeezing scenarios, sweeps and figure presets"};
  app.require_subcommand(0, 1);
  Overrides ov;
  bool schema = false;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string out, backend;
  app.add_flag("--schema", schema, "print the scenario schema and exit");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed")->check(CLI::NonNegativeNumber);
  auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  auto* out_opt = app.add_option("--out", out, "output root");
  auto* backend_opt =
      app.add_option("--backend", backend, "force a backend")->check(CLI::IsMember({"ed", "traj", "twa", "analytic"}));
  app.fallthrough();

  std::string config_path, sweep_path;
  std::vector<std::string> figures, params;
  std::size_t jump_traj = 128, twa_traj = 100000;
  auto* run = app.add_subcommand("run", "run one scenario");
  run->add_option("config", config_path, "scenario file (key = value or JSON)")->required()->check(CLI::ExistingFile);
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("spec", sweep_path, "sweep spec file")->required()->check(CLI::ExistingFile);
  auto* figure = app.add_subcommand("figure", "reproduce a figure preset");
  figure->add_option("name", figures, "fig2a fig2inset figS1 figS2 figS3 figS4 figS5 or all")->required();
  figure->add_option("--jump-traj", jump_traj, "quantum-jump trajectories where unravelled");
  figure->add_option("--twa-traj", twa_traj, "TWA samples");
  auto* model = app.add_subcommand("model", "tabulate the analytic model");
  model->add_option("params", params, "scenario file or key=value pairs")->required();

  CLI11_PARSE(app, argc, argv);

  if (schema) {
    std::cout << scenario_schema().dump(2) << '\n';
    return 0;
  }
  if (*seed_opt) ov.seed = seed;
  if (*jobs_opt) ov.jobs = jobs;
  if (*out_opt) ov.out = out;
  if (*backend_opt) ov.backend = backend;

  try {
    if (*run) return cmd_run(config_path, ov);
    if (*sweep) return cmd_sweep(sweep_path, ov);
    if (*figure) return cmd_figure(figures, ov, jump_traj, twa_traj);
    if (*model) return cmd_model(params, ov);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cout << app.help() << '\n';
  return 1;
}
