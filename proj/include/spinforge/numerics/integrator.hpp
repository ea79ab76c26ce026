#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "spinforge/core/types.hpp"

namespace spinforge {

enum class StepMethod { DormandPrince45, RungeKutta4 };

struct IntegratorOptions {
  StepMethod method = StepMethod::DormandPrince45;
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  ///< 0 picks a step from the initial derivative
  double max_step = 0.0;      ///< 0 means unbounded
  double fixed_step = 0.0;    ///< RK4 step; 0 means 1/200 of the first output interval
  std::size_t max_steps = 50'000'000;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double last_good_time)
      : std::runtime_error(what + " (last good time " + std::to_string(last_good_time) + ")"),
        last_good_time_(last_good_time) {}
  double last_good_time() const { return last_good_time_; }

 private:
  double last_good_time_;
};

void validate_time_grid(std::span<const double> times, double t0);

namespace detail {

struct Dopri5 {
  static constexpr std::array<double, 7> c{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a[7][6] = {
      {0, 0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
  };
  static constexpr std::array<double, 7> e{71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920,
                                           -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
};

/// exp(c h G) and its reciprocal for the distinct nodes of one step, reused while h is unchanged.
class DenseLawson {
 public:
  explicit DenseLawson(const Eigen::ArrayXXcd& generator)
      : g_(generator), trivial_(generator.size() == 0 || generator.abs().maxCoeff() == 0.0) {}

  bool trivial() const { return trivial_; }
  bool fits(const CMatrix& y) const { return g_.rows() == y.rows() && g_.cols() == y.cols(); }
  double stiffness_limit() const {
    if (trivial_) return std::numeric_limits<double>::infinity();
    const double decay = (-g_.real()).maxCoeff();
    return decay > 0.0 ? 40.0 / decay : std::numeric_limits<double>::infinity();
  }
  /// G .* y
  CMatrix apply_generator(const CMatrix& y) const { return (g_ * y.array()).matrix(); }

  template <std::size_t K>
  void prepare(double h, const std::array<double, K>& nodes) {
    if (trivial_ || h == h_) return;
    h_ = h;
    for (std::size_t k = 0; k < K; ++k) {
      forward_[k] = (g_ * cplx(nodes[k] * h)).exp();
      backward_[k] = forward_[k].inverse();
    }
  }
  void forward(std::size_t k, CMatrix& m) const { m.array() *= forward_[k]; }
  void backward(std::size_t k, CMatrix& m) const { m.array() *= backward_[k]; }

 private:
  const Eigen::ArrayXXcd& g_;
  bool trivial_;
  double h_ = std::numeric_limits<double>::quiet_NaN();
  std::array<Eigen::ArrayXXcd, 6> forward_;
  std::array<Eigen::ArrayXXcd, 6> backward_;
};

/// Same for G(a, b) = row(a) + col(b): the factors are row and column scalings.
class SeparableLawson {
 public:
  SeparableLawson(const Eigen::ArrayXcd& row, const Eigen::ArrayXcd& col)
      : row_(row), col_(col), trivial_(row.abs().maxCoeff() == 0.0 && col.abs().maxCoeff() == 0.0) {}

  bool trivial() const { return trivial_; }
  bool fits(const CMatrix& y) const { return row_.size() == y.rows() && col_.size() == y.cols(); }
  double stiffness_limit() const {
    if (trivial_) return std::numeric_limits<double>::infinity();
    const double decay = (-row_.real()).maxCoeff() + (-col_.real()).maxCoeff();
    return decay > 0.0 ? 40.0 / decay : std::numeric_limits<double>::infinity();
  }
  CMatrix apply_generator(const CMatrix& y) const {
    CMatrix out = y;
    out.array().colwise() *= row_;
    out.array() += (y.array().rowwise() * col_.transpose());
    return out;
  }

  template <std::size_t K>
  void prepare(double h, const std::array<double, K>& nodes) {
    if (trivial_ || h == h_) return;
    h_ = h;
    for (std::size_t k = 0; k < K; ++k) {
      row_fwd_[k] = (row_ * cplx(nodes[k] * h)).exp();
      col_fwd_[k] = (col_ * cplx(nodes[k] * h)).exp();
      row_bwd_[k] = row_fwd_[k].inverse();
      col_bwd_[k] = col_fwd_[k].inverse();
    }
  }
  void forward(std::size_t k, CMatrix& m) const { scale(m, row_fwd_[k], col_fwd_[k]); }
  void backward(std::size_t k, CMatrix& m) const { scale(m, row_bwd_[k], col_bwd_[k]); }

 private:
  static void scale(CMatrix& m, const Eigen::ArrayXcd& r, const Eigen::ArrayXcd& c) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j).array() *= r * c(j);
  }
  Eigen::ArrayXcd row_;
  Eigen::ArrayXcd col_;
  bool trivial_;
  double h_ = std::numeric_limits<double>::quiet_NaN();
  std::array<Eigen::ArrayXcd, 6> row_fwd_, col_fwd_, row_bwd_, col_bwd_;
};

inline double rms(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : std::sqrt(m.squaredNorm() / static_cast<double>(m.size()));
}

}  // namespace detail

namespace detail {

template <class Factors, class Rhs, class Observer>
IntegrationStats integrate_with(CMatrix y, double t0, Factors& fac, Rhs&& f, std::span<const double> times,
                                const IntegratorOptions& opts, Observer&& observe) {
  validate_time_grid(times, t0);
  IntegrationStats stats;
  const bool lawson = !fac.trivial();
  if (lawson && !fac.fits(y)) throw std::invalid_argument("integrate_lawson: generator shape must match the state");
  auto eval = [&](double t, const CMatrix& state, CMatrix& out) {
    f(t, state, out);
    ++stats.rhs_evaluations;
  };

  double t = t0;
  std::size_t next = 0;
  while (next < times.size() && times[next] <= t0) observe(next++, t, static_cast<const CMatrix&>(y));
  if (next == times.size()) return stats;

  const double span_total = times.back() - t0;
  double h_cap = std::min(opts.max_step > 0.0 ? opts.max_step : span_total, fac.stiffness_limit());

  CMatrix tmp(y.rows(), y.cols()), stage(y.rows(), y.cols());

  if (opts.method == StepMethod::RungeKutta4) {
    const double first_gap = times[next] - t0;
    const double h_fixed = std::min(opts.fixed_step > 0.0 ? opts.fixed_step : first_gap / 200.0, h_cap);
    std::array<CMatrix, 4> k;
    for (auto& m : k) m.resize(y.rows(), y.cols());
    constexpr std::array<double, 2> nodes{0.5, 1.0};
    while (next < times.size()) {
      const double target = times[next];
      while (t < target) {
        const double h = std::min(h_fixed, target - t);
        if (lawson) fac.prepare(h, nodes);
        auto fwd = [&](std::size_t i, CMatrix& m) {
          if (lawson) fac.forward(i, m);
        };
        auto bwd = [&](std::size_t i, CMatrix& m) {
          if (lawson) fac.backward(i, m);
        };
        eval(t, y, k[0]);
        stage = y + (0.5 * h) * k[0];
        fwd(0, stage);
        eval(t + 0.5 * h, stage, k[1]);
        bwd(0, k[1]);
        stage = y + (0.5 * h) * k[1];
        fwd(0, stage);
        eval(t + 0.5 * h, stage, k[2]);
        bwd(0, k[2]);
        stage = y + h * k[2];
        fwd(1, stage);
        eval(t + h, stage, k[3]);
        bwd(1, k[3]);
        y += (h / 6.0) * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]);
        fwd(1, y);
        t = (target - t <= h) ? target : t + h;
        if (!y.allFinite()) throw IntegrationError("non-finite state in fixed-step RK4", t - h);
        if (++stats.accepted > opts.max_steps) throw IntegrationError("step budget exhausted", t);
      }
      observe(next++, t, static_cast<const CMatrix&>(y));
    }
    return stats;
  }

  using T = Dopri5;
  constexpr std::array<double, 5> nodes{T::c[1], T::c[2], T::c[3], T::c[4], T::c[5]};
  auto node_of = [](int s) { return static_cast<std::size_t>(std::min(s - 1, 4)); };
  std::array<CMatrix, 7> k;
  for (auto& m : k) m.resize(y.rows(), y.cols());
  eval(t, y, k[0]);

  double h = opts.initial_step;
  if (h <= 0.0) {
    tmp = k[0];
    if (lawson) tmp += fac.apply_generator(y);
    const double dy = rms(tmp);
    const double sc = opts.atol + opts.rtol * rms(y);
    h = dy > 0.0 ? 0.01 * std::max(sc, rms(y)) / dy : span_total;
  }
  h = std::min(h, h_cap);
  const double h_min_rel = 1e-13;

  CMatrix y_new(y.rows(), y.cols()), err(y.rows(), y.cols());
  while (next < times.size()) {
    const double target = times[next];
    while (t < target) {
      const double remaining = target - t;
      const bool clipped = h >= remaining;
      const double h_step = clipped ? remaining : h;
      if (lawson) fac.prepare(h_step, nodes);

      for (int s = 1; s < 7; ++s) {
        stage = y;
        for (int j = 0; j < s; ++j) {
          if (T::a[s][j] != 0.0) stage += (h_step * T::a[s][j]) * k[j];
        }
        if (s == 6) y_new = stage;  // 5th-order solution in the step frame
        if (lawson) fac.forward(node_of(s), stage);
        eval(t + T::c[s] * h_step, stage, k[s]);
        if (lawson) fac.backward(node_of(s), k[s]);
      }
      err.setZero();
      for (int j = 0; j < 7; ++j) {
        if (T::e[j] != 0.0) err += (h_step * T::e[j]) * k[j];
      }
      if (lawson) {
        fac.forward(4, y_new);
        fac.forward(4, err);
      }
      double err_norm = 0.0;
      {
        const auto scale = (opts.atol + opts.rtol * y.array().abs2().max(y_new.array().abs2()).sqrt()).eval();
        err_norm = std::sqrt((err.array().abs2() / scale.square()).mean());
      }
      if (!std::isfinite(err_norm)) err_norm = 1e10;

      if (err_norm <= 1.0) {
        t = clipped ? target : t + h_step;
        y.swap(y_new);
        // FSAL: derivative at the new point in the lab frame
        k[0] = k[6];
        if (lawson) fac.forward(4, k[0]);
        ++stats.accepted;
        const double grow = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        if (!clipped) h = std::min(h_step * grow, h_cap);
        else h = std::min(std::max(h, h_step * grow), h_cap);
      } else {
        ++stats.rejected;
        h = h_step * std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 0.9);
        if (h < h_min_rel * std::max(1.0, std::abs(t))) throw IntegrationError("step size underflow", t);
      }
      if (stats.accepted + stats.rejected > opts.max_steps) throw IntegrationError("step budget exhausted", t);
    }
    observe(next++, t, static_cast<const CMatrix&>(y));
  }
  return stats;
}

}  // namespace detail

/// Integrates dy/dt = G .* y + f(t, y) with the diagonal part G treated exactly
/// (Lawson / integrating-factor Runge-Kutta). An empty G means plain Runge-Kutta.
/// `observe(k, t, y)` is called at every requested time, including times[k] == t0.
template <class Rhs, class Observer>
IntegrationStats integrate_lawson(CMatrix y, double t0, const Eigen::ArrayXXcd& generator, Rhs&& f,
                                  std::span<const double> times, const IntegratorOptions& opts,
                                  Observer&& observe) {
  detail::DenseLawson fac(generator);
  return detail::integrate_with(std::move(y), t0, fac, f, times, opts, observe);
}

/// Matrix state with G(a, b) = row(a) + col(b), e.g. -i(h_a - conj(h_b)) for rho.
struct SeparableGenerator {
  Eigen::ArrayXcd row;
  Eigen::ArrayXcd col;
};

template <class Rhs, class Observer>
IntegrationStats integrate_lawson(CMatrix y, double t0, const SeparableGenerator& generator, Rhs&& f,
                                  std::span<const double> times, const IntegratorOptions& opts,
                                  Observer&& observe) {
  detail::SeparableLawson fac(generator.row, generator.col);
  return detail::integrate_with(std::move(y), t0, fac, f, times, opts, observe);
}

}  // namespace spinforge
