#pragma once

// Classical fixed-step RK4 over the full particle system, with diagnostics
// recorded on sampled steps only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bicluster/diagnostics.hpp"
#include "bicluster/model.hpp"

namespace bicluster {

struct SimConfig {
  ModelParams params;
  SystemState initial;
  double dt = 1e-3;
  double t_end = 10.0;
  int sample_stride = 10;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<SystemState> states;
  std::vector<DiagnosticsFrame> frames;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double time, Trajectory partial)
      : std::runtime_error("integration diverged (non-finite state) at t = " + std::to_string(time)),
        time_(time),
        partial_(std::move(partial)) {}

  double time() const { return time_; }
  const Trajectory& partial() const { return partial_; }

 private:
  double time_;
  Trajectory partial_;
};

namespace detail {

inline void axpy_into(std::vector<double>& out, const std::vector<double>& base, double a,
                      const std::vector<double>& dir) {
  out.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + a * dir[i];
}

inline SystemState offset(const SystemState& s, double a, const StateDerivative& d) {
  SystemState out;
  axpy_into(out.x, s.x, a, d.x);
  axpy_into(out.v, s.v, a, d.v);
  axpy_into(out.y, s.y, a, d.y);
  axpy_into(out.w, s.w, a, d.w);
  return out;
}

inline void rk4_combine(std::vector<double>& out, const std::vector<double>& base, double dt,
                        const std::vector<double>& k1, const std::vector<double>& k2,
                        const std::vector<double>& k3, const std::vector<double>& k4) {
  out.resize(base.size());
  for (std::size_t i = 0; i < base.size(); ++i)
    out[i] = base[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

}  // namespace detail

/// One classical RK4 step. Throws DivergenceError (with an empty partial
/// trajectory) if the result is not finite; `t` is only used for reporting.
inline SystemState rk4_step(const SystemState& s, const ModelParams& p, double dt, double t = 0.0) {
  if (!(dt > 0.0)) throw PreconditionError("rk4_step: dt must be > 0");
  const auto k1 = rhs(s, p);
  const auto k2 = rhs(detail::offset(s, 0.5 * dt, k1), p);
  const auto k3 = rhs(detail::offset(s, 0.5 * dt, k2), p);
  const auto k4 = rhs(detail::offset(s, dt, k3), p);
  SystemState out;
  detail::rk4_combine(out.x, s.x, dt, k1.x, k2.x, k3.x, k4.x);
  detail::rk4_combine(out.v, s.v, dt, k1.v, k2.v, k3.v, k4.v);
  detail::rk4_combine(out.y, s.y, dt, k1.y, k2.y, k3.y, k4.y);
  detail::rk4_combine(out.w, s.w, dt, k1.w, k2.w, k3.w, k4.w);
  if (!out.all_finite()) throw DivergenceError(t + dt, Trajectory{});
  return out;
}

inline std::vector<std::string> validate_sim_config(const SimConfig& c) {
  std::vector<std::string> out = validate_params(c.params);
  if (!(c.dt > 0.0)) out.emplace_back("dt > 0");
  if (!(c.t_end >= c.dt)) out.emplace_back("t_end >= dt");
  if (c.sample_stride < 1) out.emplace_back("sample_stride >= 1");
  return out;
}

// Skipped if the final partial step would be shorter than this.
inline constexpr double kMinFinalStep = 1e-12;

/// Number of full steps of size dt that fit in [0, t_end], tolerating the
/// representation error of t_end / dt.
inline std::int64_t full_step_count(double dt, double t_end) {
  const double ratio = t_end / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return static_cast<std::int64_t>(nearest);
  return static_cast<std::int64_t>(std::floor(ratio));
}

inline Trajectory simulate(const SimConfig& config) {
  const auto problems = validate_sim_config(config);
  if (!problems.empty()) throw PreconditionError("simulate: invalid config: " + problems.front());
  check_shape(config.initial, config.params);
  if (!config.initial.all_finite()) throw PreconditionError("simulate: initial state is not finite");

  const auto& p = config.params;
  Trajectory traj;
  auto record = [&](double t, const SystemState& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
    traj.frames.push_back(compute_frame(s, p));
  };

  const std::int64_t n_full = full_step_count(config.dt, config.t_end);
  const double remainder = config.t_end - static_cast<double>(n_full) * config.dt;
  const bool partial_step = remainder > kMinFinalStep;
  const std::int64_t n_steps = n_full + (partial_step ? 1 : 0);

  SystemState state = config.initial;
  record(0.0, state);
  for (std::int64_t k = 1; k <= n_steps; ++k) {
    const bool last = k == n_steps;
    const double t_prev = static_cast<double>(k - 1) * config.dt;
    const double h = (partial_step && last) ? config.t_end - t_prev : config.dt;
    try {
      state = rk4_step(state, p, h, t_prev);
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.time(), std::move(traj));
    }
    if (last || k % config.sample_stride == 0) {
      record(last ? config.t_end : static_cast<double>(k) * config.dt, state);
    }
  }
  return traj;
}

struct ConvergenceEstimate {
  double order = 0.0;
  bool exact = false;  // every error was identically zero
  std::vector<double> errors;
};

/// Least-squares slope of log(error) against log(dt), where error is the
/// max-norm distance between the state at t_end and `oracle(t_end)`.
inline ConvergenceEstimate convergence_order(const SimConfig& config, std::span<const double> dts,
                                             const std::function<SystemState(double)>& oracle) {
  if (dts.size() < 3) throw PreconditionError("convergence_order: need at least 3 step sizes");
  for (std::size_t i = 1; i < dts.size(); ++i)
    if (std::abs(dts[i] / dts[i - 1] - 0.5) > 1e-9)
      throw PreconditionError("convergence_order: each step size must halve the previous one");

  const SystemState expected = oracle(config.t_end);
  check_shape(expected, config.params);

  ConvergenceEstimate est;
  for (double dt : dts) {
    SimConfig c = config;
    c.dt = dt;
    c.sample_stride = std::numeric_limits<int>::max();
    const auto traj = simulate(c);
    const auto& got = traj.states.back();
    double err = 0.0;
    auto accumulate = [&err](const std::vector<double>& a, const std::vector<double>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a[i] - b[i]));
    };
    accumulate(got.x, expected.x);
    accumulate(got.v, expected.v);
    accumulate(got.y, expected.y);
    accumulate(got.w, expected.w);
    est.errors.push_back(err);
  }

  const bool all_zero = std::all_of(est.errors.begin(), est.errors.end(), [](double e) { return e == 0.0; });
  if (all_zero) {
    est.exact = true;
    est.order = std::numeric_limits<double>::infinity();
    return est;
  }
  for (double e : est.errors)
    if (!(e > 0.0)) throw PreconditionError("convergence_order: mixed zero and nonzero errors");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(dts.size());
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double lx = std::log(dts[i]);
    const double ly = std::log(est.errors[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  est.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return est;
}

}  // namespace bicluster
