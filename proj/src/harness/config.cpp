#include "spinforge/harness/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spinforge/analytic/rates.hpp"

namespace spinforge {

using nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

std::vector<std::string> split_path(std::string_view path, int line_no) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = path.find('.', start);
    const auto part = trim(path.substr(start, dot == std::string_view::npos ? dot : dot - start));
    if (part.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty name in '" + std::string(path) + "'");
    parts.emplace_back(part);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

json scalar(std::string_view raw, int line_no) {
  const auto s = trim(raw);
  if (s.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') throw ConfigError("line " + std::to_string(line_no) + ": unterminated string");
    return std::string(s.substr(1, s.size() - 2));
  }
  if (s == "true") return true;
  if (s == "false") return false;
  const bool integral = s.find_first_of(".eEin") == std::string_view::npos;
  if (integral) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  double d = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec == std::errc() && ptr == s.data() + s.size()) return d;
  return std::string(s);
}

json value(std::string_view raw, int line_no) {
  const auto s = trim(raw);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
    json arr = json::array();
    const auto body = trim(s.substr(1, s.size() - 2));
    if (body.empty()) return arr;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = body.find(',', start);
      arr.push_back(scalar(body.substr(start, comma == std::string_view::npos ? comma : comma - start), line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return arr;
  }
  return scalar(s, line_no);
}

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

double number_field(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) field_error(key, "expected a number");
  return j[key].get<double>();
}

double rate_field(const json& j, const char* key, double fallback) {
  const double v = number_field(j, key, fallback);
  if (!(v >= 0.0) || !std::isfinite(v)) field_error(key, "must be finite and non-negative");
  return v;
}

long long integer_field(const json& j, const char* key, long long fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j[key];
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) {
    return static_cast<long long>(v.get<double>());
  }
  field_error(key, "expected an integer");
}

std::string string_field(const json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) field_error(key, "expected a string");
  return j[key].get<std::string>();
}

struct SchemaEntry {
  const char* key;
  const char* type;
  json fallback;
  const char* doc;
};

const std::vector<SchemaEntry>& schema_entries() {
  static const std::vector<SchemaEntry> entries = {
      {"name", "string", "", "run label, also the run folder prefix"},
      {"protocol", "string", nullptr, "oat or tss (required)"},
      {"backend", "string", "auto", "auto, ed, traj, twa or analytic"},
      {"atoms", "integer", nullptr, "total atom number N (required)"},
      {"chi", "number", 1.0, "twisting rate"},
      {"gamma", "number", 0.0, "collective emission rate"},
      {"gamma_s", "number", 0.0, "single-particle emission rate"},
      {"gamma_el", "number", 0.0, "single-particle dephasing rate"},
      {"cavity", "object", nullptr, "{g, kappa, detuning}; replaces chi and gamma"},
      {"sigma_n", "number", 0.0, "atom-number standard deviation per ensemble"},
      {"times", "array", nullptr, "explicit output times"},
      {"t_min", "number", 0.0, "first output time"},
      {"t_max", "number", nullptr, "last output time (required without times)"},
      {"t_points", "integer", 101, "number of output times"},
      {"t_spacing", "string", "linear", "linear or log"},
      {"n_traj", "integer", 0, "trajectories; 0 picks the backend default"},
      {"seed", "integer", 1, "master seed"},
      {"n_trunc", "integer", 5, "retained two-spin J blocks"},
      {"tss_dissipator", "string", "full", "full or sy_only"},
      {"fluctuation_nodes", "integer", 3, "Gauss-Hermite nodes per ensemble (1, 3 or 5) for exact runs"},
      {"jobs", "integer", 0, "worker threads; 0 = all cores"},
      {"out", "string", "runs", "output directory"},
  };
  return entries;
}

}  // namespace

json parse_config_text(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
  }
  json root = json::object();
  std::vector<std::string> section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string stripped = strip_comment(raw);
    const auto line = trim(stripped);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      section = split_path(line.substr(1, line.size() - 2), line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    auto path = section;
    for (auto& p : split_path(line.substr(0, eq), line_no)) path.push_back(std::move(p));
    json* node = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      json& next = (*node)[path[i]];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) throw ConfigError("line " + std::to_string(line_no) + ": '" + path[i] + "' is not a section");
      node = &next;
    }
    if (node->contains(path.back())) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + path.back() + "'");
    }
    (*node)[path.back()] = value(line.substr(eq + 1), line_no);
  }
  return root;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::Auto: return "auto";
    case Backend::Exact: return "ed";
    case Backend::Trajectories: return "traj";
    case Backend::Twa: return "twa";
    case Backend::Analytic: return "analytic";
  }
  return "auto";
}

Backend backend_from_string(std::string_view name) {
  if (name == "auto") return Backend::Auto;
  if (name == "ed" || name == "exact") return Backend::Exact;
  if (name == "traj" || name == "trajectories") return Backend::Trajectories;
  if (name == "twa") return Backend::Twa;
  if (name == "analytic") return Backend::Analytic;
  throw ConfigError("unknown backend '" + std::string(name) + "'");
}

std::vector<double> TimeGrid::resolve() const {
  if (!values.empty()) return values;
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 1.0 : static_cast<double>(i) / (points - 1);
    t[i] = log_spacing ? t_min * std::pow(t_max / t_min, f) : t_min + (t_max - t_min) * f;
  }
  return t;
}

double ScenarioConfig::effective_chi() const {
  return cavity ? cavity_rates(cavity->g, cavity->kappa, cavity->detuning).chi : chi;
}

double ScenarioConfig::effective_gamma() const {
  return cavity ? cavity_rates(cavity->g, cavity->kappa, cavity->detuning).gamma : gamma;
}

ScenarioConfig scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const auto& e : schema_entries()) known = known || key == e.key;
    if (!known) field_error(key, "unknown key");
  }
  ScenarioConfig c;
  c.name = string_field(j, "name", "");
  if (!j.contains("protocol")) field_error("protocol", "required");
  try {
    c.protocol = protocol_from_string(string_field(j, "protocol", ""));
  } catch (const std::invalid_argument&) {
    field_error("protocol", "expected oat or tss");
  }
  try {
    c.backend = backend_from_string(string_field(j, "backend", "auto"));
  } catch (const ConfigError&) {
    field_error("backend", "expected auto, ed, traj, twa or analytic");
  }
  if (!j.contains("atoms")) field_error("atoms", "required");
  const long long atoms = integer_field(j, "atoms", 0);
  if (atoms < 1 || atoms > 100000000) field_error("atoms", "must be a positive integer");
  c.atoms = static_cast<int>(atoms);
  if (c.protocol == Protocol::TSS && c.atoms % 2 != 0) field_error("atoms", "TSS needs an even atom number");

  c.chi = number_field(j, "chi", 1.0);
  if (!std::isfinite(c.chi)) field_error("chi", "must be finite");
  c.gamma = rate_field(j, "gamma", 0.0);
  c.gamma_s = rate_field(j, "gamma_s", 0.0);
  c.gamma_el = rate_field(j, "gamma_el", 0.0);
  if (j.contains("cavity")) {
    const json& cav = j["cavity"];
    if (!cav.is_object()) field_error("cavity", "expected an object with g, kappa, detuning");
    for (const auto& [key, _] : cav.items()) {
      if (key != "g" && key != "kappa" && key != "detuning") field_error("cavity." + key, "unknown key");
    }
    for (const char* key : {"g", "kappa", "detuning"}) {
      if (!cav.contains(key) || !cav[key].is_number()) field_error(std::string("cavity.") + key, "expected a number");
    }
    c.cavity = CavitySetting{cav["g"].get<double>(), cav["kappa"].get<double>(), cav["detuning"].get<double>()};
    if (c.cavity->kappa < 0.0) field_error("cavity.kappa", "must be non-negative");
    if (c.cavity->kappa == 0.0 && c.cavity->detuning == 0.0) field_error("cavity", "detuning and kappa both zero");
    if (j.contains("chi") || j.contains("gamma")) field_error("cavity", "give either cavity or chi/gamma");
  }
  c.sigma_n = rate_field(j, "sigma_n", 0.0);

  if (j.contains("times")) {
    const json& t = j["times"];
    if (!t.is_array()) field_error("times", "expected an array of numbers");
    for (const auto& v : t) {
      if (!v.is_number()) field_error("times", "expected an array of numbers");
      c.times.values.push_back(v.get<double>());
    }
    if (c.times.values.empty()) field_error("times", "empty time grid");
    for (const char* key : {"t_min", "t_max", "t_points", "t_spacing"}) {
      if (j.contains(key)) field_error(key, "cannot be combined with times");
    }
  } else {
    if (!j.contains("t_max")) field_error("t_max", "required without an explicit times array");
    c.times.t_min = number_field(j, "t_min", 0.0);
    c.times.t_max = number_field(j, "t_max", 0.0);
    c.times.points = static_cast<int>(integer_field(j, "t_points", 101));
    const std::string spacing = string_field(j, "t_spacing", "linear");
    if (spacing != "linear" && spacing != "log") field_error("t_spacing", "expected linear or log");
    c.times.log_spacing = spacing == "log";
    if (c.times.points < 1) field_error("t_points", "empty time grid");
    if (!(c.times.t_max >= c.times.t_min) || c.times.t_min < 0.0) field_error("t_max", "need 0 <= t_min <= t_max");
    if (c.times.log_spacing && !(c.times.t_min > 0.0)) field_error("t_min", "log spacing needs t_min > 0");
  }
  for (double t : c.times.resolve()) {
    if (!(t >= 0.0) || !std::isfinite(t)) field_error("times", "times must be finite and non-negative");
  }

  const long long n_traj = integer_field(j, "n_traj", 0);
  if (n_traj < 0 || n_traj == 1) field_error("n_traj", "must be 0 or at least 2");
  c.n_traj = static_cast<std::size_t>(n_traj);
  const long long seed = integer_field(j, "seed", 1);
  if (seed < 0) field_error("seed", "must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.n_trunc = static_cast<int>(integer_field(j, "n_trunc", 5));
  if (c.n_trunc < 1) field_error("n_trunc", "must be at least 1");
  const std::string diss = string_field(j, "tss_dissipator", "full");
  if (diss != "full" && diss != "sy_only") field_error("tss_dissipator", "expected full or sy_only");
  c.sy_only = diss == "sy_only";
  c.fluctuation_nodes = static_cast<int>(integer_field(j, "fluctuation_nodes", 3));
  if (c.fluctuation_nodes != 1 && c.fluctuation_nodes != 3 && c.fluctuation_nodes != 5) {
    field_error("fluctuation_nodes", "expected 1, 3 or 5");
  }
  c.jobs = static_cast<int>(integer_field(j, "jobs", 0));
  if (c.jobs < 0) field_error("jobs", "must be non-negative");
  c.out = string_field(j, "out", "runs");

  return c;
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["protocol"] = std::string(c.protocol == Protocol::OAT ? "oat" : "tss");
  j["backend"] = std::string(to_string(c.backend));
  j["atoms"] = c.atoms;
  if (c.cavity) {
    j["cavity"] = {{"g", c.cavity->g}, {"kappa", c.cavity->kappa}, {"detuning", c.cavity->detuning}};
  } else {
    j["chi"] = c.chi;
    j["gamma"] = c.gamma;
  }
  j["gamma_s"] = c.gamma_s;
  j["gamma_el"] = c.gamma_el;
  j["sigma_n"] = c.sigma_n;
  if (!c.times.values.empty()) {
    j["times"] = c.times.values;
  } else {
    j["t_min"] = c.times.t_min;
    j["t_max"] = c.times.t_max;
    j["t_points"] = c.times.points;
    j["t_spacing"] = c.times.log_spacing ? "log" : "linear";
  }
  j["n_traj"] = c.n_traj;
  j["seed"] = c.seed;
  j["n_trunc"] = c.n_trunc;
  j["tss_dissipator"] = c.sy_only ? "sy_only" : "full";
  j["fluctuation_nodes"] = c.fluctuation_nodes;
  j["jobs"] = c.jobs;
  j["out"] = c.out;
  return j;
}

json scenario_schema() {
  json s = json::array();
  for (const auto& e : schema_entries()) {
    s.push_back({{"key", e.key}, {"type", e.type}, {"default", e.fallback}, {"doc", e.doc}});
  }
  return s;
}

std::string content_hash(const json& j) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace spinforge
