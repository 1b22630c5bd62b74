#pragma once

// Closed-form solutions of the small systems and analytic bounds, used as
// ground truth for the integrator and the certificates.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "bicluster/model.hpp"

namespace bicluster {

class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double deficit) : std::runtime_error(what), deficit_(deficit) {}
  /// dv0 - kappa_s * integral, i.e. how far the velocity spread exceeds
  /// what the intra coupling can absorb.
  double deficit() const { return deficit_; }

 private:
  double deficit_;
};

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {

inline double simpson_recurse(const std::function<double(double)>& f, double a, double b, double fa,
                              double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10, int max_depth = 50) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive_simpson(f, b, a, tol, max_depth);
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Integral of psi over [a, b]: closed forms for constant weights and
/// power laws with beta in {0.5, 1}, adaptive Simpson otherwise.
inline double weight_integral(const WeightSpec& psi, double a, double b, double tol = 1e-10) {
  if (b < a) return -weight_integral(psi, b, a, tol);
  if (a < 0.0) throw DomainError("weight_integral: negative distance");
  if (psi.kind == WeightKind::Constant || psi.beta == 0.0) return psi.amplitude * (b - a);
  if (psi.kind == WeightKind::PowerLaw && psi.beta == 1.0)
    return psi.amplitude * (std::atan(b) - std::atan(a));
  if (psi.kind == WeightKind::PowerLaw && psi.beta == 0.5)
    return psi.amplitude * (std::asinh(b) - std::asinh(a));
  // Split long ranges so the recursion sees the decaying head in detail.
  double total = 0.0;
  double lo = a;
  while (lo < b) {
    const double hi = std::min(b, std::max(2.0 * lo, lo + 1.0));
    total += adaptive_simpson([&psi](double r) { return eval_weight(psi, r); }, lo, hi, tol);
    lo = hi;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Small systems with constant weights

struct TwoParticleIC {
  std::vector<double> x0, y0, v0, w0;
  double kappa_d = 1.0;
};

struct TwoParticleState {
  std::vector<double> x, y, v, w;
};

// With psi_d = 1 and N1 = N2 = 1, u = v - w obeys u' = 2 kd u while v + w and
// the centroid velocity are conserved.
inline TwoParticleState two_particle_exact(const TwoParticleIC& ic, double t) {
  if (!(t >= 0.0)) throw PreconditionError("two_particle_exact: t must be >= 0");
  if (!(ic.kappa_d > 0.0)) throw PreconditionError("two_particle_exact: kappa_d must be > 0");
  const std::size_t d = ic.x0.size();
  if (ic.y0.size() != d || ic.v0.size() != d || ic.w0.size() != d)
    throw StructuralError("two_particle_exact: inconsistent dimensions");
  const double rate = 2.0 * ic.kappa_d;
  const double growth = std::exp(rate * t);
  const double growth_m1 = std::expm1(rate * t);
  TwoParticleState s{std::vector<double>(d), std::vector<double>(d), std::vector<double>(d),
                     std::vector<double>(d)};
  for (std::size_t c = 0; c < d; ++c) {
    const double u0 = ic.v0[c] - ic.w0[c];
    const double sum_v = ic.v0[c] + ic.w0[c];
    const double u = u0 * growth;
    const double z = (ic.x0[c] - ic.y0[c]) + u0 / rate * growth_m1;
    const double sum_x = ic.x0[c] + ic.y0[c] + t * sum_v;
    s.v[c] = 0.5 * (sum_v + u);
    s.w[c] = 0.5 * (sum_v - u);
    s.x[c] = 0.5 * (sum_x + z);
    s.y[c] = 0.5 * (sum_x - z);
  }
  return s;
}

inline SystemState to_system_state(const TwoParticleState& s) { return {s.x, s.v, s.y, s.w}; }

struct ThreeParticleIC {
  std::vector<double> u1_0;  // v1 - v2
  std::vector<double> u2_0;  // v2 - w1
  double kappa_s = 1.0;
  double kappa_d = 1.0;
};

struct ThreeParticleDifferences {
  std::vector<double> u1, u2;
};

// (N1, N2) = (2, 1), psi_s = psi_d = 1. The repulsion on each v_i is
// normalized by N2 = 1, which gives
//   u1' = (kd - ks) u1,   u2' = (ks + kd)/2 u1 + 2 kd u2,
// so u1 -> 0 if and only if ks > kd.
inline ThreeParticleDifferences three_particle_exact(const ThreeParticleIC& ic, double t) {
  if (!(t >= 0.0)) throw PreconditionError("three_particle_exact: t must be >= 0");
  if (ic.u1_0.size() != ic.u2_0.size()) throw StructuralError("three_particle_exact: inconsistent dimensions");
  const double mode1 = std::exp((ic.kappa_d - ic.kappa_s) * t);
  const double mode2 = std::exp(2.0 * ic.kappa_d * t);
  ThreeParticleDifferences out{std::vector<double>(ic.u1_0.size()), std::vector<double>(ic.u1_0.size())};
  for (std::size_t c = 0; c < ic.u1_0.size(); ++c) {
    const double a = -0.5 * ic.u1_0[c];
    out.u1[c] = ic.u1_0[c] * mode1;
    out.u2[c] = (ic.u2_0[c] - a) * mode2 + a * mode1;
  }
  return out;
}

struct CenterVelocities {
  std::vector<double> vc, wc;
};

/// Group-mean velocities when psi_d = 1 and delta = 0: the sum is conserved
/// and the difference grows like exp(2 kd t).
inline CenterVelocities macro_exact_constant_inter(const std::vector<double>& vc0, const std::vector<double>& wc0,
                                                   double kappa_d, double t) {
  if (!(t >= 0.0)) throw PreconditionError("macro_exact_constant_inter: t must be >= 0");
  if (vc0.size() != wc0.size()) throw StructuralError("macro_exact_constant_inter: inconsistent dimensions");
  const double growth = std::exp(2.0 * kappa_d * t);
  CenterVelocities out{std::vector<double>(vc0.size()), std::vector<double>(vc0.size())};
  for (std::size_t c = 0; c < vc0.size(); ++c) {
    const double mean = 0.5 * (vc0[c] + wc0[c]);
    const double half_diff = 0.5 * (vc0[c] - wc0[c]) * growth;
    out.vc[c] = mean + half_diff;
    out.wc[c] = mean - half_diff;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kinetic energy bounds

/// Uniform bound on M2 under Rayleigh friction: max{2 + 4 kd psi_d^inf / delta, M2(0)}.
inline double riccati_upper_bound(const ModelParams& p, double m2_0) {
  if (!(p.delta > 0.0)) throw PreconditionError("riccati_upper_bound: requires delta > 0");
  return std::max(2.0 + 4.0 * p.kappa_d * p.psi_d.amplitude / p.delta, m2_0);
}

inline double exp_growth_bound(double m2_0, double kappa_d, double psi_d_sup, double t) {
  if (!(t >= 0.0)) throw PreconditionError("exp_growth_bound: t must be >= 0");
  return m2_0 * std::exp(4.0 * kappa_d * psi_d_sup * t);
}

// ---------------------------------------------------------------------------
// Flocking radius

namespace detail {

// Upper bound on the integral of psi over [x, inf), or +inf if it diverges.
inline double weight_tail_bound(const WeightSpec& psi, double x) {
  if (psi.kind == WeightKind::Constant || psi.beta == 0.0) return std::numeric_limits<double>::infinity();
  if (psi.kind == WeightKind::PowerLaw) {
    if (psi.beta <= 0.5) return std::numeric_limits<double>::infinity();
    return psi.amplitude * std::pow(std::max(x, 1e-300), 1.0 - 2.0 * psi.beta) / (2.0 * psi.beta - 1.0);
  }
  return psi.amplitude * std::exp(-psi.beta * x) / psi.beta;
}

}  // namespace detail

/// Smallest x >= dx0 with kappa_s * int_{dx0}^{x} psi_s = dv0. This bounds the
/// position diameter of a group whose weights satisfy the integral condition.
/// Throws InfeasibleError when kappa_s * int_{dx0}^{inf} psi_s <= dv0.
inline double flocking_radius(const WeightSpec& psi, double kappa_s, double dx0, double dv0) {
  if (!(kappa_s > 0.0)) throw PreconditionError("flocking_radius: kappa_s must be > 0");
  if (!(dx0 >= 0.0) || !(dv0 >= 0.0)) throw PreconditionError("flocking_radius: dx0, dv0 must be >= 0");
  if (dv0 == 0.0) return dx0;
  const double target = dv0 / kappa_s;
  const double a = psi.amplitude;

  if (psi.kind == WeightKind::Constant || psi.beta == 0.0) return dx0 + target / a;
  if (psi.kind == WeightKind::PowerLaw && psi.beta == 1.0) {
    const double remaining = std::numbers::pi / 2.0 - std::atan(dx0);
    if (target / a >= remaining)
      throw InfeasibleError("flocking_radius: integral condition violated", dv0 - kappa_s * a * remaining);
    return std::tan(std::atan(dx0) + target / a);
  }
  if (psi.kind == WeightKind::PowerLaw && psi.beta == 0.5) return std::sinh(std::asinh(dx0) + target / a);

  // Bracket by doubling, then bisect.
  double lo = dx0;
  double hi = std::max(2.0 * dx0, dx0 + 1.0);
  double below = 0.0;  // integral over [dx0, lo]
  for (int iter = 0;; ++iter) {
    const double piece = weight_integral(psi, lo, hi);
    if (below + piece >= target) break;
    below += piece;
    const double tail = detail::weight_tail_bound(psi, hi);
    if (below + tail <= target || iter > 2000)
      throw InfeasibleError("flocking_radius: integral condition violated", dv0 - kappa_s * (below + tail));
    lo = hi;
    hi = 2.0 * hi;
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double part = weight_integral(psi, lo, mid);
    if (below + part >= target) {
      hi = mid;
    } else {
      below += part;
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace bicluster
