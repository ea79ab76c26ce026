#include "spinforge/solver/result.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace spinforge {

namespace {

constexpr const char* kSecondNames[6] = {"xx", "yy", "zz", "xy", "xz", "yz"};
constexpr int kSecondIndex[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};

}  // namespace

std::vector<double> EvolutionResult::times() const {
  std::vector<double> t;
  t.reserve(records.size());
  for (const auto& r : records) t.push_back(r.t);
  return t;
}

void EvolutionResult::write_csv(std::ostream& out) const {
  const std::size_t n_blocks = records.empty() ? 0 : records.front().block_populations.size();
  out << "t,mean_x,mean_y,mean_z";
  for (const char* n : kSecondNames) out << ",m_" << n;
  out << ",se_mean_x,se_mean_y,se_mean_z";
  for (const char* n : kSecondNames) out << ",se_m_" << n;
  out << ",lab_sz,emission,energy,trace_drift,A,B,C,v_minus,v_plus,nu,psi_min,spin_length,xi2,xi2_db,"
         "xi2_nominal,xi2_nominal_db,se_xi2";
  for (std::size_t b = 0; b < n_blocks; ++b) out << ",pop_" << b;
  out << '\n';
  const auto old = out.precision(17);
  for (const auto& r : records) {
    out << r.t << ',' << r.mean(0) << ',' << r.mean(1) << ',' << r.mean(2);
    for (const auto& ij : kSecondIndex) out << ',' << r.second(ij[0], ij[1]);
    out << ',' << r.mean_se(0) << ',' << r.mean_se(1) << ',' << r.mean_se(2);
    for (const auto& ij : kSecondIndex) out << ',' << r.second_se(ij[0], ij[1]);
    const auto& s = r.squeezing;
    const auto& c = r.correlators;
    out << ',' << r.lab_sz << ',' << r.emission << ',' << r.energy << ',' << r.trace_drift << ',' << c.A << ','
        << c.B << ',' << c.C << ',' << s.v_minus << ',' << s.v_plus << ',' << s.nu << ',' << s.psi_min << ','
        << s.spin_length << ',' << s.xi2 << ',' << s.xi2_db << ',' << s.xi2_nominal << ',' << s.xi2_nominal_db << ',' << r.xi2_se;
    for (double p : r.block_populations) out << ',' << p;
    out << '\n';
  }
  out.precision(old);
}

nlohmann::json EvolutionResult::sidecar() const {
  nlohmann::json j = metadata;
  j["backend"] = backend;
  j["time_unit"] = time_unit;
  j["axes"] = std::string(to_string(axes));
  j["atoms"] = atoms;
  j["converged"] = converged;
  j["warnings"] = warnings;
  j["integrator"] = {{"accepted_steps", stats.accepted},
                     {"rejected_steps", stats.rejected},
                     {"rhs_evaluations", stats.rhs_evaluations}};
  double drift = 0.0;
  for (const auto& r : records) drift = std::max(drift, r.trace_drift);
  j["max_trace_drift"] = drift;
  if (!records.empty() && !records.back().block_populations.empty()) {
    double lowest = 0.0;
    for (const auto& r : records) lowest = std::max(lowest, r.block_populations.back());
    j["max_lowest_block_population"] = lowest;
  }
  return j;
}

void attach_squeezing(EvolutionResult& result) {
  for (auto& r : result.records) {
    r.correlators = correlators_from_moments(r.mean, r.second, result.axes);
    if (r.mean.norm() > 1e-12) {
      r.squeezing = squeezing_report(r.correlators, result.atoms);
    } else {
      const auto v = variances_from_correlators(r.correlators);
      r.squeezing = SqueezingReport{};
      r.squeezing.v_minus = v.v_minus;
      r.squeezing.v_plus = v.v_plus;
      r.squeezing.nu = v.nu;
      r.squeezing.psi_min = 0.5 * kPi - v.nu;
      r.squeezing.xi2 = r.squeezing.xi2_db = std::numeric_limits<double>::quiet_NaN();
      r.squeezing.xi2_nominal = v.v_minus / (0.25 * result.atoms);
      r.squeezing.xi2_nominal_db = to_db(r.squeezing.xi2_nominal);
    }
  }
}

SqueezingOptimum best_squeezing(const EvolutionResult& result, Normalization norm) {
  const auto& rec = result.records;
  if (rec.empty()) throw std::invalid_argument("best_squeezing: no records");
  auto value = [&](std::size_t i) {
    return norm == Normalization::Wineland ? rec[i].squeezing.xi2 : rec[i].squeezing.xi2_nominal;
  };
  std::size_t best = rec.size();
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (!std::isfinite(value(i))) continue;
    if (best == rec.size() || value(i) < value(best)) best = i;
  }
  if (best == rec.size()) throw std::runtime_error("best_squeezing: no finite squeezing values");
  SqueezingOptimum o;
  o.index = best;
  o.t = rec[best].t;
  o.xi2 = value(best);
  o.at_boundary = best == 0 || best + 1 == rec.size();
  if (!o.at_boundary && std::isfinite(value(best - 1)) && std::isfinite(value(best + 1))) {
    const double t0 = rec[best - 1].t, t1 = rec[best].t, t2 = rec[best + 1].t;
    const double y0 = value(best - 1), y1 = value(best), y2 = value(best + 1);
    // Lagrange parabola through the three samples
    const double d01 = (y1 - y0) / (t1 - t0);
    const double d12 = (y2 - y1) / (t2 - t1);
    const double curv = (d12 - d01) / (t2 - t0);
    if (curv > 0.0) {
      const double tv = 0.5 * (t0 + t1) - d01 / (2.0 * curv);
      if (tv > t0 && tv < t2) {
        o.t = tv;
        o.xi2 = std::min(y1, y1 + d01 * (tv - t1) + curv * (tv - t1) * (tv - t0));
      }
    }
  }
  o.xi2_db = to_db(o.xi2);
  return o;
}

}  // namespace spinforge
