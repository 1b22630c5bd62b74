#pragma once

// Sampled verification of theorem hypotheses, proof envelopes and the
// Gronwall-type comparison lemmas along computed trajectories. Continuous-time
// sup/inf are replaced by extremes over the recorded samples; nothing here is
// a rigorous enclosure.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bicluster/integrator.hpp"
#include "bicluster/oracles.hpp"
#include "bicluster/stages.hpp"

namespace bicluster {

enum class CertStatus { Holds, Violated, NotApplicable };

inline const char* to_string(CertStatus s) {
  switch (s) {
    case CertStatus::Holds: return "holds";
    case CertStatus::Violated: return "violated";
    case CertStatus::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

struct CertificateResult {
  std::string name;
  CertStatus status = CertStatus::NotApplicable;
  double margin = 0.0;                 // worst signed slack, positive = holds
  std::optional<double> witness_time;  // time of the worst slack
  std::map<std::string, double> details;
  std::string note;

  bool holds() const { return status == CertStatus::Holds; }
};

/// Values of a scalar function on an increasing time grid.
struct SampledFunction {
  std::vector<double> t;
  std::vector<double> y;

  static SampledFunction from(const std::vector<double>& times, const std::function<double(double)>& f) {
    SampledFunction s{times, {}};
    s.y.reserve(times.size());
    for (double ti : times) s.y.push_back(f(ti));
    return s;
  }

  std::size_t size() const { return t.size(); }

  double at(double time) const {
    if (t.empty()) throw PreconditionError("SampledFunction: empty");
    if (time <= t.front()) return y.front();
    if (time >= t.back()) return y.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t k = static_cast<std::size_t>(it - t.begin());
    const double s = (time - t[k - 1]) / (t[k] - t[k - 1]);
    return y[k - 1] + s * (y[k] - y[k - 1]);
  }

  // max |y| over [a, b], using the samples inside plus interpolated endpoints.
  double max_abs(double a, double b) const {
    double m = std::max(std::abs(at(a)), std::abs(at(b)));
    for (std::size_t k = 0; k < t.size(); ++k)
      if (t[k] >= a && t[k] <= b) m = std::max(m, std::abs(y[k]));
    return m;
  }

  double l1_norm() const {
    double s = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) s += 0.5 * (t[k] - t[k - 1]) * (std::abs(y[k]) + std::abs(y[k - 1]));
    return s;
  }
};

namespace detail {

// Running minimum of signed slacks.
struct SlackTracker {
  double margin = std::numeric_limits<double>::infinity();
  std::optional<double> witness;

  void add(double slack, double time) {
    if (std::isnan(slack)) slack = -std::numeric_limits<double>::infinity();
    if (slack < margin) {
      margin = slack;
      witness = time;
    }
  }
};

inline CertificateResult finish(CertificateResult r, const SlackTracker& s, bool strict = false) {
  r.margin = s.margin;
  r.witness_time = s.witness;
  const bool ok = strict ? s.margin > 0.0 : s.margin >= 0.0;
  r.status = ok ? CertStatus::Holds : CertStatus::Violated;
  if (!r.witness_time) r.witness_time = 0.0;
  return r;
}

inline CertificateResult not_applicable(const std::string& name, const std::string& why) {
  CertificateResult r;
  r.name = name;
  r.status = CertStatus::NotApplicable;
  r.note = why;
  return r;
}

inline void check_grid(const SampledFunction& a, const SampledFunction& b, const char* who) {
  if (a.size() != b.size() || a.t != b.t)
    throw StructuralError(std::string(who) + ": sampled functions must share the same grid");
  if (a.size() < 1) throw PreconditionError(std::string(who) + ": no samples");
}

inline void check_time(const SampledFunction& y, double t, const char* who) {
  if (y.t.empty() || t < y.t.front() || t > y.t.back())
    throw PreconditionError(std::string(who) + ": t outside the sampled range");
}

inline void check_nonnegative(const SampledFunction& f, const char* who) {
  for (double v : f.y)
    if (v < 0.0) throw PreconditionError(std::string(who) + ": samples must be nonnegative");
}

inline double envelope_slack(double value, double envelope, double tol) {
  const double scale = envelope > 0.0 ? envelope : 1.0;
  return (envelope * (1.0 + tol) - value) / scale;
}

inline SampledFunction frame_series(const Trajectory& traj, double DiagnosticsFrame::*field) {
  SampledFunction s{traj.times, {}};
  for (const auto& f : traj.frames) s.y.push_back(f.*field);
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gronwall-type lemmas. Times are measured from the first sample.

/// y' <= -alpha y + f: y(t) <= max_{[t/2,t]}|f|/alpha + y(0) e^{-alpha t} + (|f|_inf/alpha) e^{-alpha t/2}.
inline double gronwall_decay_bound(const SampledFunction& y, double alpha, const SampledFunction& f, double t) {
  detail::check_grid(y, f, "gronwall_decay_bound");
  detail::check_time(y, t, "gronwall_decay_bound");
  if (!(alpha > 0.0)) throw PreconditionError("gronwall_decay_bound: alpha must be > 0");
  const double t0 = y.t.front();
  const double s = t - t0;
  const double recent = f.max_abs(t0 + 0.5 * s, t);
  const double overall = f.max_abs(t0, t);
  return recent / alpha + y.y.front() * std::exp(-alpha * s) + overall / alpha * std::exp(-0.5 * alpha * s);
}

/// y' >= alpha y - f:
/// y(t) >= m/alpha + (y(0) - F/alpha) e^{alpha t} + (F/alpha - m/alpha) e^{alpha t/2},
/// with m = max_{[t/2,t]}|f| and F = max_{[0,t]}|f|.
inline double gronwall_lower_bound(const SampledFunction& y, double alpha, const SampledFunction& f, double t) {
  detail::check_grid(y, f, "gronwall_lower_bound");
  detail::check_time(y, t, "gronwall_lower_bound");
  if (!(alpha > 0.0)) throw PreconditionError("gronwall_lower_bound: alpha must be > 0");
  const double t0 = y.t.front();
  const double s = t - t0;
  const double m = f.max_abs(t0 + 0.5 * s, t) / alpha;
  const double big = f.max_abs(t0, t) / alpha;
  return m + (y.y.front() - big) * std::exp(alpha * s) + (big - m) * std::exp(0.5 * alpha * s);
}

/// y' <= alpha(t) y + f(t) with alpha, f >= 0: sup y <= (y(0) + |f|_1) e^{|alpha|_1}.
inline double gronwall_integrable_upper(const SampledFunction& y, const SampledFunction& alpha,
                                        const SampledFunction& f) {
  detail::check_grid(y, alpha, "gronwall_integrable_upper");
  detail::check_grid(y, f, "gronwall_integrable_upper");
  detail::check_nonnegative(alpha, "gronwall_integrable_upper");
  detail::check_nonnegative(f, "gronwall_integrable_upper");
  return (y.y.front() + f.l1_norm()) * std::exp(alpha.l1_norm());
}

/// y' >= alpha(t) y - f(t) with alpha, f >= 0 and y >= 0: y >= y(0) - |f|_1 e^{|alpha|_1}.
inline double gronwall_integrable_lower(const SampledFunction& y, const SampledFunction& alpha,
                                        const SampledFunction& f) {
  detail::check_grid(y, alpha, "gronwall_integrable_lower");
  detail::check_grid(y, f, "gronwall_integrable_lower");
  detail::check_nonnegative(alpha, "gronwall_integrable_lower");
  detail::check_nonnegative(f, "gronwall_integrable_lower");
  return y.y.front() - f.l1_norm() * std::exp(alpha.l1_norm());
}

// Checkers: the inequality at every sample, with absolute slack `tol`.

inline CertificateResult check_gronwall_decay(const SampledFunction& y, double alpha, const SampledFunction& f,
                                              double tol = 1e-9) {
  CertificateResult r;
  r.name = "gronwall_decay";
  detail::SlackTracker s;
  for (std::size_t k = 0; k < y.size(); ++k) s.add(gronwall_decay_bound(y, alpha, f, y.t[k]) + tol - y.y[k], y.t[k]);
  return detail::finish(std::move(r), s);
}

inline CertificateResult check_gronwall_lower(const SampledFunction& y, double alpha, const SampledFunction& f,
                                              double tol = 1e-9) {
  CertificateResult r;
  r.name = "gronwall_lower";
  detail::SlackTracker s;
  for (std::size_t k = 0; k < y.size(); ++k) s.add(y.y[k] - gronwall_lower_bound(y, alpha, f, y.t[k]) + tol, y.t[k]);
  return detail::finish(std::move(r), s);
}

inline CertificateResult check_gronwall_integrable_upper(const SampledFunction& y, const SampledFunction& alpha,
                                                         const SampledFunction& f, double tol = 1e-9) {
  CertificateResult r;
  r.name = "gronwall_integrable_upper";
  const double bound = gronwall_integrable_upper(y, alpha, f);
  r.details["bound"] = bound;
  detail::SlackTracker s;
  for (std::size_t k = 0; k < y.size(); ++k) s.add(bound + tol - y.y[k], y.t[k]);
  return detail::finish(std::move(r), s);
}

inline CertificateResult check_gronwall_integrable_lower(const SampledFunction& y, const SampledFunction& alpha,
                                                         const SampledFunction& f, double tol = 1e-9) {
  CertificateResult r;
  r.name = "gronwall_integrable_lower";
  const double bound = gronwall_integrable_lower(y, alpha, f);
  r.details["bound"] = bound;
  detail::SlackTracker s;
  for (std::size_t k = 0; k < y.size(); ++k) s.add(y.y[k] - bound + tol, y.t[k]);
  return detail::finish(std::move(r), s);
}

// ---------------------------------------------------------------------------
// Constant inter-group weight, no friction

namespace detail {

inline bool constant_inter_regime(const ModelParams& p) {
  return !p.psi_d.decays_to_zero() && p.delta == 0.0;
}

// kappa_s * int_{d0}^{inf} psi_s - dv0, or +inf when the integral diverges.
inline double integral_condition_slack(const WeightSpec& psi, double kappa_s, double d0, double dv0) {
  if (!psi.decays_to_zero()) return std::numeric_limits<double>::infinity();
  if (psi.kind == WeightKind::PowerLaw && psi.beta <= 0.5) return std::numeric_limits<double>::infinity();
  double x = std::max(2.0 * d0, d0 + 1.0);
  double integral = weight_integral(psi, d0, x);
  while (weight_tail_bound(psi, x) > 1e-12 * std::max(1.0, integral)) {
    integral += weight_integral(psi, x, 2.0 * x);
    x *= 2.0;
  }
  return kappa_s * integral - dv0;
}

}  // namespace detail

/// Hypotheses of the constant-inter-weight flocking theorem.
inline CertificateResult check_theorem31_hypotheses(const SystemState& s0, const ModelParams& p) {
  const std::string name = "theorem31_hypotheses";
  if (!detail::constant_inter_regime(p)) return detail::not_applicable(name, "requires constant psi_d and delta = 0");
  const auto f = compute_frame(s0, p);
  CertificateResult r;
  r.name = name;
  r.details["dx0"] = f.dx;
  r.details["dy0"] = f.dy;
  r.details["dv0"] = f.dv;
  r.details["dw0"] = f.dw;
  r.details["center_sep0"] = f.center_sep;

  detail::SlackTracker slack;
  slack.add(p.kappa_s, 0.0);
  slack.add(p.kappa_d, 0.0);
  slack.add(f.dx, 0.0);
  slack.add(f.dy, 0.0);
  slack.add(f.center_sep, 0.0);

  const double sx = detail::integral_condition_slack(p.psi_s, p.kappa_s, f.dx, f.dv);
  const double sy = detail::integral_condition_slack(p.psi_s, p.kappa_s, f.dy, f.dw);
  r.details["integral_slack_x"] = sx;
  r.details["integral_slack_y"] = sy;
  slack.add(sx, 0.0);
  slack.add(sy, 0.0);
  if (sx <= 0.0) {
    r.details["deficit_x"] = -sx;
    r.note = "D(V0) exceeds kappa_s * int psi_s over [D(X0), inf)";
  }
  if (sy <= 0.0) {
    r.details["deficit_y"] = -sy;
    r.note = r.note.empty() ? "D(W0) exceeds kappa_s * int psi_s over [D(Y0), inf)" : r.note + "; same for group 2";
  }
  if (p.kappa_s > 0.0 && sx > 0.0) r.details["x_M"] = flocking_radius(p.psi_s, p.kappa_s, f.dx, f.dv);
  if (p.kappa_s > 0.0 && sy > 0.0) r.details["y_M"] = flocking_radius(p.psi_s, p.kappa_s, f.dy, f.dw);
  return detail::finish(std::move(r), slack, true);
}

struct Theorem31Tolerances {
  double envelope = 1e-2;  // relative on velocity envelopes, absolute on x_M, y_M
  double macro = 1e-6;     // relative on the exact center-velocity law
};

inline CertificateResult verify_theorem31_conclusions(const Trajectory& traj, const ModelParams& p, double x_m,
                                                      double y_m, const Theorem31Tolerances& tol = {}) {
  const std::string name = "theorem31_conclusions";
  if (!detail::constant_inter_regime(p)) return detail::not_applicable(name, "requires constant psi_d and delta = 0");
  if (traj.empty()) throw PreconditionError("verify_theorem31_conclusions: empty trajectory");
  CertificateResult r;
  r.name = name;
  const auto& f0 = traj.frames.front();
  const double rate_x = p.kappa_s * eval_weight(p.psi_s, x_m);
  const double rate_y = p.kappa_s * eval_weight(p.psi_s, y_m);
  r.details["x_M"] = x_m;
  r.details["y_M"] = y_m;
  r.details["rate_v"] = rate_x;
  r.details["rate_w"] = rate_y;

  detail::SlackTracker all, sx, sy, sv, sw, sm;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.times[k];
    const auto& f = traj.frames[k];
    const double t_rel = t - traj.times.front();
    sx.add(x_m + tol.envelope - f.dx, t);
    sy.add(y_m + tol.envelope - f.dy, t);
    sv.add(detail::envelope_slack(f.dv, f0.dv * std::exp(-rate_x * t_rel), tol.envelope), t);
    sw.add(detail::envelope_slack(f.dw, f0.dw * std::exp(-rate_y * t_rel), tol.envelope), t);
    const double exact = f0.center_sep * std::exp(2.0 * p.kappa_d * t_rel);
    const double rel = exact > 0.0 ? std::abs(f.center_sep - exact) / exact : f.center_sep;
    sm.add(tol.macro - rel, t);
  }
  r.details["slack_dx"] = sx.margin;
  r.details["slack_dy"] = sy.margin;
  r.details["slack_dv"] = sv.margin;
  r.details["slack_dw"] = sw.margin;
  r.details["slack_macro"] = sm.margin;
  for (const auto* s : {&sx, &sy, &sv, &sw, &sm}) all.add(s->margin, *s->witness);
  return detail::finish(std::move(r), all);
}

/// L(t) = D(V)(t) + kappa_s |int_{D(X)(0)}^{D(X)(t)} psi_s| <= D(V)(0) (1 + tol) for both groups,
/// and L+ = D(V) + kappa_s int_0^{D(X)} psi_s nonincreasing between samples up to tol.
inline CertificateResult verify_lyapunov(const Trajectory& traj, const ModelParams& p, double tol = 1e-2) {
  const std::string name = "lyapunov";
  if (!detail::constant_inter_regime(p)) return detail::not_applicable(name, "requires constant psi_d and delta = 0");
  if (traj.empty()) throw PreconditionError("verify_lyapunov: empty trajectory");
  CertificateResult r;
  r.name = name;
  const auto& f0 = traj.frames.front();

  detail::SlackTracker all, stab_x, stab_y, mono_x, mono_y;
  auto run_group = [&](double DiagnosticsFrame::*pos, double DiagnosticsFrame::*vel, detail::SlackTracker& stab,
                       detail::SlackTracker& mono) {
    const double d0 = f0.*pos;
    const double v0 = f0.*vel;
    const double scale = v0 > 0.0 ? v0 : 1.0;
    const double l_plus0 = v0 + p.kappa_s * weight_integral(p.psi_s, 0.0, d0);
    double prev = l_plus0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const auto& f = traj.frames[k];
      const double shift = std::abs(weight_integral(p.psi_s, d0, f.*pos));
      // 1e-12 absolute floor so roundoff in an exactly flocked group is not a violation.
      stab.add((v0 * (1.0 + tol) + 1e-12 - (f.*vel + p.kappa_s * shift)) / scale, traj.times[k]);
      const double l_plus = f.*vel + p.kappa_s * weight_integral(p.psi_s, 0.0, f.*pos);
      if (k > 0) mono.add((prev + tol * std::max(l_plus0, 1e-300) - l_plus) / std::max(l_plus0, 1.0), traj.times[k]);
      prev = l_plus;
    }
  };
  run_group(&DiagnosticsFrame::dx, &DiagnosticsFrame::dv, stab_x, mono_x);
  run_group(&DiagnosticsFrame::dy, &DiagnosticsFrame::dw, stab_y, mono_y);
  r.details["slack_group1"] = stab_x.margin;
  r.details["slack_group2"] = stab_y.margin;
  if (mono_x.witness) r.details["monotone_slack_group1"] = mono_x.margin;
  if (mono_y.witness) r.details["monotone_slack_group2"] = mono_y.margin;
  for (const auto* s : {&stab_x, &stab_y, &mono_x, &mono_y})
    if (s->witness) all.add(s->margin, *s->witness);
  return detail::finish(std::move(r), all);
}

// ---------------------------------------------------------------------------
// Decaying inter-group weight

struct Theorem41Options {
  double eps0 = 0.5;
  double eps0_tilde = 0.5;
  double tol = 1e-2;
};

inline CertificateResult monitor_theorem41(const Trajectory& traj, const ModelParams& p,
                                           const Theorem41Options& opt = {}) {
  const std::string name = "theorem41";
  if (p.delta != 0.0) return detail::not_applicable(name, "requires delta = 0");
  if (traj.size() < 2) throw PreconditionError("monitor_theorem41: trajectory needs at least 2 samples");
  CertificateResult r;
  r.name = name;
  const double psi_inf = p.psi_d.amplitude;
  const double kd = p.kappa_d;
  const double rate = kd * psi_inf;
  const double t0 = traj.times.front();
  const auto& f0 = traj.frames.front();
  const double m2hat0 = f0.m2_hat;
  const double u0 = f0.center_sep;

  // (a) coercivity of intra over inter coupling
  double worst = std::numeric_limits<double>::infinity();
  double worst_t = t0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double q = p.kappa_s * traj.frames[k].psi_s_lower - kd * traj.frames[k].psi_d_upper;
    if (q < worst) {
      worst = q;
      worst_t = traj.times[k];
    }
  }
  const double eta0 = 2.0 * worst;
  r.details["eta0"] = eta0;

  // (b) decay of the extremal inter weight. On a finite horizon the smallest
  // C0 always exists; decay is accepted only if g(t) = psi_d_upper e^{(2+eps0) kd psi t}
  // peaks before the final third of the run.
  const double grow = (2.0 + opt.eps0) * rate;
  const std::size_t tail = detail::final_third_begin(traj);
  double c0 = 0.0, g_head = 0.0, g_tail = 0.0, g_tail_t = t0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double g = traj.frames[k].psi_d_upper * std::exp(grow * (traj.times[k] - t0));
    c0 = std::max(c0, g);
    if (k < tail) {
      g_head = std::max(g_head, g);
    } else if (g > g_tail) {
      g_tail = g;
      g_tail_t = traj.times[k];
    }
  }
  const double decay_margin = g_head > 0.0 ? 1.0 - g_tail / g_head : (g_tail > 0.0 ? -1.0 : 1.0);
  r.details["C0"] = c0;
  r.details["decay_margin"] = decay_margin;

  double c0_tilde = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.size(); ++k)
    c0_tilde = std::min(c0_tilde,
                        traj.frames[k].psi_d_lower * std::exp(opt.eps0_tilde * rate * (traj.times[k] - t0)));
  r.details["C0_tilde"] = c0_tilde;

  detail::SlackTracker all;
  all.add(eta0, worst_t);
  all.add(decay_margin, g_tail_t);

  if (eta0 > 0.0 && psi_inf > 0.0) {
    // (c) Step B envelope. The forcing comes from |vc - wc| <= sqrt(2 M2(0)) e^{2 kd psi t}.
    const double c1 = std::max(2.0 * c0 * std::sqrt(2.0 * f0.m2) * kd / eta0, std::sqrt(m2hat0));
    r.details["C1"] = c1;
    r.details["C1_printed"] = std::max(2.0 * c0 * std::sqrt(2.0 * m2hat0) * kd / eta0, std::sqrt(m2hat0));
    // (d) Step C uniform bound on the center separation.
    const double c2 = (u0 + 6.0 * c0 * c1 / ((2.0 + opt.eps0) * psi_inf)) *
                      std::exp(2.0 * c0 / ((2.0 + opt.eps0) * psi_inf));
    r.details["C2"] = c2;
    // Step D improved envelope and Step F lower bound on the separation.
    const double c3 = std::max(2.0 * kd * c0 * c2 / eta0, std::sqrt(m2hat0));
    const double c4 = std::max(4.0 * c0 * c3 / ((2.0 + opt.eps0) * psi_inf),
                               6.0 * kd * c0 * c3 / (eta0 / 4.0 + (2.0 + opt.eps0) * rate));
    const double c5 = u0 - c4 * std::exp(2.0 * c0_tilde / (opt.eps0_tilde * psi_inf));
    r.details["C3"] = c3;
    r.details["C4"] = c4;
    r.details["C5"] = c5;

    detail::SlackTracker env_b, env_c, env_d, sep_f;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double t = traj.times[k] - t0;
      const auto& f = traj.frames[k];
      const double m = std::sqrt(f.m2_hat);
      const double eb = 3.0 * c1 * std::max(std::exp(-0.5 * opt.eps0 * rate * t), std::exp(-0.25 * eta0 * t));
      const double ed = 3.0 * c3 * std::max(std::exp(-0.5 * grow * t), std::exp(-0.25 * eta0 * t));
      env_b.add(detail::envelope_slack(m, eb, opt.tol), traj.times[k]);
      env_c.add(detail::envelope_slack(f.center_sep, c2, opt.tol), traj.times[k]);
      env_d.add(detail::envelope_slack(m, ed, opt.tol), traj.times[k]);
      sep_f.add(f.center_sep - c5 + opt.tol * std::abs(c5), traj.times[k]);
    }
    r.details["slack_step_b"] = env_b.margin;
    r.details["slack_step_c"] = env_c.margin;
    r.details["slack_step_d"] = env_d.margin;
    r.details["slack_step_f"] = sep_f.margin;
    for (const auto* s : {&env_b, &env_c, &env_d, &sep_f}) all.add(s->margin, *s->witness);
  }
  return detail::finish(std::move(r), all, true);
}

struct Theorem51Options {
  double tol = 1e-2;
};

inline CertificateResult monitor_theorem51(const Trajectory& traj, const ModelParams& p,
                                           const Theorem51Options& opt = {}) {
  const std::string name = "theorem51";
  if (!(p.delta > 0.0)) return detail::not_applicable(name, "requires delta > 0");
  if (traj.size() < 2) throw PreconditionError("monitor_theorem51: trajectory needs at least 2 samples");
  CertificateResult r;
  r.name = name;
  const double psi_inf = p.psi_d.amplitude;
  const double kd = p.kappa_d;
  const double t0 = traj.times.front();
  const auto& f0 = traj.frames.front();

  double eta1 = std::numeric_limits<double>::infinity();
  double eta1_t = t0;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& f = traj.frames[k];
    const double q = p.kappa_s * f.psi_s_lower - kd * f.psi_d_upper - p.delta;
    if (q < eta1) {
      eta1 = q;
      eta1_t = traj.times[k];
    }
  }
  const double m2_inf = riccati_upper_bound(p, f0.m2);
  r.details["eta1"] = eta1;
  r.details["M2_inf"] = m2_inf;

  // Linear lower envelope C8 t + gamma0 of the inter-group distance.
  std::vector<double> ts, ds;
  for (std::size_t k = detail::final_third_begin(traj); k < traj.size(); ++k) {
    ts.push_back(traj.times[k] - t0);
    ds.push_back(traj.frames[k].min_inter_dist);
  }
  const double c8 = detail::least_squares_line(ts, ds).slope;
  double gamma0 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.size(); ++k)
    gamma0 = std::min(gamma0, traj.frames[k].min_inter_dist - c8 * (traj.times[k] - t0));
  r.details["C8"] = c8;
  r.details["gamma0"] = gamma0;

  detail::SlackTracker all;
  all.add(eta1, eta1_t);
  all.add(c8, traj.times.back());

  detail::SlackTracker energy;
  for (std::size_t k = 0; k < traj.size(); ++k)
    energy.add(detail::envelope_slack(traj.frames[k].m2, m2_inf, 1e-6), traj.times[k]);
  r.details["slack_riccati"] = energy.margin;
  all.add(energy.margin, *energy.witness);

  if (eta1 > 0.0) {
    const double c6 = std::max(std::sqrt(f0.m2_hat), 2.0 * kd * psi_inf * std::sqrt(m2_inf) / eta1);
    const double c7 = 2.0 * kd * psi_inf * c6 +
                      p.delta * std::sqrt(static_cast<double>(std::max(p.n1, p.n2))) * std::pow(m2_inf, 1.5);
    r.details["C6"] = c6;
    r.details["C7"] = c7;
    // Reported only: the threshold exceeds the a priori bound 2 sqrt(M2_inf)
    // on the center separation, so no configuration can meet it.
    r.details["separation_threshold_margin"] = f0.center_sep - c7 / p.delta;

    detail::SlackTracker bound_b, bound_e;
    const SampledFunction y = SampledFunction::from(traj.times, [&](double t) {
      const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
      return std::sqrt(traj.frames[static_cast<std::size_t>(it - traj.times.begin())].m2_hat);
    });
    const SampledFunction forcing = SampledFunction::from(traj.times, [&](double t) {
      return 2.0 * kd * std::sqrt(m2_inf) * eval_weight(p.psi_d, std::max(0.0, c8 * (t - t0) + gamma0));
    });
    for (std::size_t k = 0; k < traj.size(); ++k) {
      bound_b.add(detail::envelope_slack(y.y[k], c6, opt.tol), traj.times[k]);
      const double e = gronwall_decay_bound(y, eta1, forcing, traj.times[k]);
      bound_e.add(detail::envelope_slack(y.y[k], e, opt.tol), traj.times[k]);
    }
    r.details["slack_step_b"] = bound_b.margin;
    r.details["slack_step_e"] = bound_e.margin;
    all.add(bound_b.margin, *bound_b.witness);
    all.add(bound_e.margin, *bound_e.witness);
  }
  return detail::finish(std::move(r), all, true);
}

}  // namespace bicluster
