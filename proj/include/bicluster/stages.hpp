#pragma once

// Trajectory-level summaries: three-stage bi-clustering detection and
// finite-horizon proxies for bi-cluster flocking.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "bicluster/integrator.hpp"

namespace bicluster {

struct StageThresholds {
  double eps_v = 0.1;   // min_{i,j} |v_i - w_j| must stay >= eps_v
  double eps_x = 0.5;   // min_{i,j} |x_i - y_j| must stay >= eps_x
  double eps_f = 1e-4;  // m2_hat must stay <= eps_f
};

struct StageReport {
  std::optional<double> t_velocity_sep;
  std::optional<double> t_spatial_sep;
  std::optional<double> t_flock;
  StageThresholds thresholds;
};

namespace detail {

// First time from which `q(t) >= level` (or <= when `above` is false) holds
// for every remaining sample, linearly interpolated inside the bracket.
inline std::optional<double> persistent_crossing(const Trajectory& traj,
                                                 const std::function<double(const DiagnosticsFrame&)>& q,
                                                 double level, bool above) {
  auto holds = [&](std::size_t i) {
    const double value = q(traj.frames[i]);
    return above ? value >= level : value <= level;
  };
  const std::size_t n = traj.size();
  std::size_t first_ok = n;
  for (std::size_t i = n; i-- > 0;) {
    if (!holds(i)) break;
    first_ok = i;
  }
  if (first_ok == n) return std::nullopt;
  if (first_ok == 0) return traj.times[0];

  const double t0 = traj.times[first_ok - 1], t1 = traj.times[first_ok];
  const double q0 = q(traj.frames[first_ok - 1]), q1 = q(traj.frames[first_ok]);
  if (q1 == q0 || !std::isfinite(q0) || !std::isfinite(q1)) return t1;
  const double s = std::clamp((level - q0) / (q1 - q0), 0.0, 1.0);
  return t0 + s * (t1 - t0);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LineFit least_squares_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double den = n * sxx - sx * sx;
  if (xs.size() < 2 || den == 0.0) return {0.0, xs.empty() ? 0.0 : sy / n};
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

// Samples whose time lies in the last third of the recorded horizon.
inline std::size_t final_third_begin(const Trajectory& traj) {
  const double t_cut = traj.times.front() + (traj.times.back() - traj.times.front()) * (2.0 / 3.0);
  std::size_t i = 0;
  while (i < traj.size() && traj.times[i] < t_cut) ++i;
  return std::min(i, traj.size() >= 2 ? traj.size() - 2 : std::size_t{0});
}

}  // namespace detail

inline StageReport detect_stages(const Trajectory& traj, const StageThresholds& th = {}) {
  if (traj.size() < 2) throw PreconditionError("detect_stages: trajectory needs at least 2 samples");
  StageReport r;
  r.thresholds = th;
  r.t_velocity_sep = detail::persistent_crossing(
      traj, [](const DiagnosticsFrame& f) { return f.min_inter_vel_dist; }, th.eps_v, true);
  r.t_spatial_sep = detail::persistent_crossing(
      traj, [](const DiagnosticsFrame& f) { return f.min_inter_dist; }, th.eps_x, true);
  r.t_flock = detail::persistent_crossing(
      traj, [](const DiagnosticsFrame& f) { return f.m2_hat; }, th.eps_f, false);
  return r;
}

struct FlockingReport {
  double sup_dx = 0.0, sup_dy = 0.0;             // boundedness proxy
  double terminal_dv = 0.0, terminal_dw = 0.0;   // alignment proxy
  double terminal_vel_gap = 0.0;                 // min_{i,j} |v_i - w_j| at t_end
  double min_vel_gap = 0.0;                      // ... and its minimum over samples
  double separation_slope = 0.0;                 // linear fit of min_inter_dist, final third
  double separation_intercept = 0.0;
  double separation_log_rate = 0.0;              // slope of log(min_inter_dist), final third
};

inline FlockingReport flocking_report(const Trajectory& traj, const ModelParams& /*params*/) {
  if (traj.empty()) throw PreconditionError("flocking_report: empty trajectory");
  FlockingReport r;
  r.min_vel_gap = std::numeric_limits<double>::infinity();
  for (const auto& f : traj.frames) {
    r.sup_dx = std::max(r.sup_dx, f.dx);
    r.sup_dy = std::max(r.sup_dy, f.dy);
    r.min_vel_gap = std::min(r.min_vel_gap, f.min_inter_vel_dist);
  }
  const auto& last = traj.frames.back();
  r.terminal_dv = last.dv;
  r.terminal_dw = last.dw;
  r.terminal_vel_gap = last.min_inter_vel_dist;

  std::vector<double> ts, ds, logs, log_ts;
  for (std::size_t i = detail::final_third_begin(traj); i < traj.size(); ++i) {
    ts.push_back(traj.times[i]);
    ds.push_back(traj.frames[i].min_inter_dist);
    if (traj.frames[i].min_inter_dist > 0.0) {
      log_ts.push_back(traj.times[i]);
      logs.push_back(std::log(traj.frames[i].min_inter_dist));
    }
  }
  const auto lin = detail::least_squares_line(ts, ds);
  r.separation_slope = lin.slope;
  r.separation_intercept = lin.intercept;
  r.separation_log_rate = detail::least_squares_line(log_ts, logs).slope;
  return r;
}

}  // namespace bicluster
