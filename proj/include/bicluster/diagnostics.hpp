#pragma once

// Scalar observables of a single state: velocity moments, the micro-macro
// split into group averages and fluctuations, diameters and the extremal
// communication weights.

#include <algorithm>
#include <limits>
#include <vector>

#include "bicluster/model.hpp"

namespace bicluster {

struct Moments {
  std::vector<double> m1_v, m1_w;
  double m2_v = 0.0, m2_w = 0.0, m2 = 0.0;
};

struct MicroMacro {
  std::vector<double> xc, yc, vc, wc;
  std::vector<double> x_hat, v_hat, y_hat, w_hat;
};

struct Diameters {
  double dx = 0.0, dv = 0.0, dy = 0.0, dw = 0.0;
};

struct InterGroupExtremes {
  double min_inter_dist = 0.0, max_inter_dist = 0.0;
  double psi_s_lower = 0.0, psi_s_upper = 0.0;
  double psi_d_lower = 0.0, psi_d_upper = 0.0;
};

struct DiagnosticsFrame {
  std::vector<double> m1_v, m1_w;
  double m2_v = 0.0, m2_w = 0.0, m2 = 0.0;
  double m2_hat = 0.0;
  double center_sep = 0.0;
  double dx = 0.0, dv = 0.0, dy = 0.0, dw = 0.0;
  double min_inter_dist = 0.0, max_inter_dist = 0.0;
  double psi_s_lower = 0.0, psi_s_upper = 0.0;
  double psi_d_lower = 0.0, psi_d_upper = 0.0;
  // min over (i, j) of |v_i - w_j|; drives velocity-separation detection.
  double min_inter_vel_dist = 0.0;

  bool operator==(const DiagnosticsFrame&) const = default;
};

namespace detail {

inline std::vector<double> group_mean(const std::vector<double>& arr, int n, int dim) {
  std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) mean[c] += arr[static_cast<std::size_t>(i) * dim + c];
  for (double& c : mean) c /= n;
  return mean;
}

inline double mean_norm_squared(const std::vector<double>& arr, int n, int dim) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += norm_squared(particle(arr, i, dim));
  return s / n;
}

inline std::vector<double> subtract_mean(const std::vector<double>& arr, const std::vector<double>& mean,
                                         int n, int dim) {
  std::vector<double> out(arr.size());
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) {
      const std::size_t o = static_cast<std::size_t>(i) * dim + c;
      out[o] = arr[o] - mean[c];
    }
  return out;
}

inline double diameter(const std::vector<double>& arr, int n, int dim) {
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k)
      best = std::max(best, distance(particle(arr, i, dim), particle(arr, k, dim)));
  return best;
}

// Smallest distinct-pair distance; a single-particle group reports 0.
inline double min_pair_distance(const std::vector<double>& arr, int n, int dim) {
  if (n < 2) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k)
      best = std::min(best, distance(particle(arr, i, dim), particle(arr, k, dim)));
  return best;
}

}  // namespace detail

inline Moments moments(const SystemState& s, const ModelParams& p) {
  check_shape(s, p);
  Moments m;
  m.m1_v = detail::group_mean(s.v, p.n1, p.dim);
  m.m1_w = detail::group_mean(s.w, p.n2, p.dim);
  m.m2_v = detail::mean_norm_squared(s.v, p.n1, p.dim);
  m.m2_w = detail::mean_norm_squared(s.w, p.n2, p.dim);
  m.m2 = m.m2_v + m.m2_w;
  return m;
}

inline MicroMacro micro_macro(const SystemState& s, const ModelParams& p) {
  check_shape(s, p);
  MicroMacro mm;
  mm.xc = detail::group_mean(s.x, p.n1, p.dim);
  mm.vc = detail::group_mean(s.v, p.n1, p.dim);
  mm.yc = detail::group_mean(s.y, p.n2, p.dim);
  mm.wc = detail::group_mean(s.w, p.n2, p.dim);
  mm.x_hat = detail::subtract_mean(s.x, mm.xc, p.n1, p.dim);
  mm.v_hat = detail::subtract_mean(s.v, mm.vc, p.n1, p.dim);
  mm.y_hat = detail::subtract_mean(s.y, mm.yc, p.n2, p.dim);
  mm.w_hat = detail::subtract_mean(s.w, mm.wc, p.n2, p.dim);
  return mm;
}

/// M2(V_hat) + M2(W_hat): kinetic energy of the fluctuations about each group mean.
inline double fluctuation_energy(const SystemState& s, const ModelParams& p) {
  const auto mm = micro_macro(s, p);
  return detail::mean_norm_squared(mm.v_hat, p.n1, p.dim) +
         detail::mean_norm_squared(mm.w_hat, p.n2, p.dim);
}

inline Diameters diameters(const SystemState& s, const ModelParams& p) {
  check_shape(s, p);
  return {detail::diameter(s.x, p.n1, p.dim), detail::diameter(s.v, p.n1, p.dim),
          detail::diameter(s.y, p.n2, p.dim), detail::diameter(s.w, p.n2, p.dim)};
}

// Weights are nonincreasing, so each extreme is the weight at the opposite
// extreme distance. psi_s ranges over intra-group pairs of both groups,
// psi_d over inter-group pairs.
inline InterGroupExtremes inter_group_extremes(const SystemState& s, const ModelParams& p) {
  check_shape(s, p);
  InterGroupExtremes e;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (int i = 0; i < p.n1; ++i)
    for (int j = 0; j < p.n2; ++j) {
      const double r = distance(particle(s.x, i, p.dim), particle(s.y, j, p.dim));
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  e.min_inter_dist = lo;
  e.max_inter_dist = hi;
  e.psi_d_upper = eval_weight(p.psi_d, lo);
  e.psi_d_lower = eval_weight(p.psi_d, hi);

  const double intra_max = std::max(detail::diameter(s.x, p.n1, p.dim), detail::diameter(s.y, p.n2, p.dim));
  const double intra_min = std::min(detail::min_pair_distance(s.x, p.n1, p.dim),
                                    detail::min_pair_distance(s.y, p.n2, p.dim));
  e.psi_s_upper = eval_weight(p.psi_s, intra_min);
  e.psi_s_lower = eval_weight(p.psi_s, intra_max);
  return e;
}

inline double min_inter_velocity_distance(const SystemState& s, const ModelParams& p) {
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.n1; ++i)
    for (int j = 0; j < p.n2; ++j)
      lo = std::min(lo, distance(particle(s.v, i, p.dim), particle(s.w, j, p.dim)));
  return lo;
}

inline DiagnosticsFrame compute_frame(const SystemState& s, const ModelParams& p) {
  const auto m = moments(s, p);
  const auto d = diameters(s, p);
  const auto e = inter_group_extremes(s, p);

  DiagnosticsFrame f;
  f.m1_v = m.m1_v;
  f.m1_w = m.m1_w;
  f.m2_v = m.m2_v;
  f.m2_w = m.m2_w;
  f.m2 = m.m2;
  f.m2_hat = fluctuation_energy(s, p);
  double sep = 0.0;
  for (int c = 0; c < p.dim; ++c) sep += (m.m1_v[c] - m.m1_w[c]) * (m.m1_v[c] - m.m1_w[c]);
  f.center_sep = std::sqrt(sep);
  f.dx = d.dx;
  f.dv = d.dv;
  f.dy = d.dy;
  f.dw = d.dw;
  f.min_inter_dist = e.min_inter_dist;
  f.max_inter_dist = e.max_inter_dist;
  f.psi_s_lower = e.psi_s_lower;
  f.psi_s_upper = e.psi_s_upper;
  f.psi_d_lower = e.psi_d_lower;
  f.psi_d_upper = e.psi_d_upper;
  f.min_inter_vel_dist = min_inter_velocity_distance(s, p);
  return f;
}

}  // namespace bicluster
