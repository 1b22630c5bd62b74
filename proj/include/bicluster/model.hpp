#pragma once

// Two-ensemble Cucker-Smale system with attractive intra-group alignment,
// repulsive inter-group alignment and Rayleigh friction.
//
//   x_i' = v_i
//   v_i' = (ks/N1) sum_k psi_s(|x_k - x_i|)(v_k - v_i)
//        - (kd/N2) sum_k psi_d(|y_k - x_i|)(w_k - v_i) + delta v_i (1 - |v_i|^2)
//
// and symmetrically for (y_j, w_j) with the roles of the groups swapped.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bicluster {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct StructuralError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class WeightKind { Constant, PowerLaw, Exponential };

inline const char* to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::Constant: return "constant";
    case WeightKind::PowerLaw: return "power_law";
    case WeightKind::Exponential: return "exponential";
  }
  return "unknown";
}

inline WeightKind weight_kind_from_string(const std::string& name) {
  if (name == "constant") return WeightKind::Constant;
  if (name == "power_law" || name == "powerlaw") return WeightKind::PowerLaw;
  if (name == "exponential") return WeightKind::Exponential;
  throw DomainError("unknown weight kind '" + name + "'");
}

/// Bounded nonincreasing communication weight. `amplitude` is the value at
/// r = 0 and doubles as the sup-norm psi^inf used by the bound formulas.
struct WeightSpec {
  WeightKind kind = WeightKind::Constant;
  double amplitude = 1.0;
  double beta = 0.0;

  static WeightSpec constant(double amplitude = 1.0) {
    return {WeightKind::Constant, amplitude, 0.0};
  }
  static WeightSpec power_law(double amplitude, double beta) {
    return {WeightKind::PowerLaw, amplitude, beta};
  }
  static WeightSpec exponential(double amplitude, double beta) {
    return {WeightKind::Exponential, amplitude, beta};
  }

  // Constant with beta = 0 is the only kind that does not decay.
  bool decays_to_zero() const {
    return kind != WeightKind::Constant && beta > 0.0;
  }

  bool operator==(const WeightSpec&) const = default;
};

inline double eval_weight(const WeightSpec& spec, double r) {
  if (!(r >= 0.0)) throw DomainError("eval_weight: distance must be >= 0");
  switch (spec.kind) {
    case WeightKind::Constant:
      return spec.amplitude;
    case WeightKind::PowerLaw:
      return spec.amplitude * std::pow(1.0 + r * r, -spec.beta);
    case WeightKind::Exponential:
      return spec.amplitude * std::exp(-spec.beta * r);
  }
  return spec.amplitude;
}

struct ModelParams {
  int n1 = 1;
  int n2 = 1;
  int dim = 1;
  double kappa_s = 0.0;
  double kappa_d = 0.0;
  double delta = 0.0;
  WeightSpec psi_s;
  WeightSpec psi_d;

  bool operator==(const ModelParams&) const = default;
};

/// Violated invariants as human-readable strings; empty means valid.
inline std::vector<std::string> validate_params(const ModelParams& p) {
  std::vector<std::string> out;
  if (p.n1 < 1) out.emplace_back("n1 >= 1");
  if (p.n2 < 1) out.emplace_back("n2 >= 1");
  if (p.dim < 1) out.emplace_back("dim >= 1");
  if (!(p.kappa_s >= 0.0)) out.emplace_back("kappa_s >= 0");
  if (!(p.kappa_d >= 0.0)) out.emplace_back("kappa_d >= 0");
  if (!(p.delta >= 0.0)) out.emplace_back("delta >= 0");
  auto check_weight = [&out](const WeightSpec& w, const char* name) {
    std::string n(name);
    if (!(w.amplitude > 0.0) || !std::isfinite(w.amplitude))
      out.push_back(n + ".amplitude > 0");
    if (!(w.beta >= 0.0) || !std::isfinite(w.beta))
      out.push_back(n + ".beta >= 0");
  };
  check_weight(p.psi_s, "psi_s");
  check_weight(p.psi_d, "psi_d");
  return out;
}

// Flat, contiguous per-group coordinates: particle i occupies
// [i*dim, (i+1)*dim) of each array.
struct SystemState {
  std::vector<double> x, v;  // group 1
  std::vector<double> y, w;  // group 2

  static SystemState zeros(const ModelParams& p) {
    const auto a = static_cast<std::size_t>(p.n1) * static_cast<std::size_t>(p.dim);
    const auto b = static_cast<std::size_t>(p.n2) * static_cast<std::size_t>(p.dim);
    return {std::vector<double>(a, 0.0), std::vector<double>(a, 0.0),
            std::vector<double>(b, 0.0), std::vector<double>(b, 0.0)};
  }

  bool all_finite() const {
    for (const auto* arr : {&x, &v, &y, &w})
      for (double c : *arr)
        if (!std::isfinite(c)) return false;
    return true;
  }

  bool operator==(const SystemState&) const = default;
};

// Same layout as SystemState: (x', v', y', w').
using StateDerivative = SystemState;

inline void check_shape(const SystemState& s, const ModelParams& p) {
  const auto a = static_cast<std::size_t>(p.n1) * static_cast<std::size_t>(p.dim);
  const auto b = static_cast<std::size_t>(p.n2) * static_cast<std::size_t>(p.dim);
  if (s.x.size() != a || s.v.size() != a || s.y.size() != b || s.w.size() != b)
    throw StructuralError("state shape does not match n1/n2/dim of the parameters");
}

inline std::span<const double> particle(const std::vector<double>& arr, int i, int dim) {
  return {arr.data() + static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim)};
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double norm_squared(std::span<const double> a) {
  double s = 0.0;
  for (double c : a) s += c * c;
  return s;
}

namespace detail {

// Intra-group alignment: each unordered pair is evaluated once and its
// contribution is added with opposite signs to both members.
inline void add_intra(const std::vector<double>& pos, const std::vector<double>& vel,
                      int n, int dim, const WeightSpec& psi, double coeff,
                      std::vector<double>& acc) {
  if (coeff == 0.0) return;
  for (int i = 0; i < n; ++i) {
    for (int k = i + 1; k < n; ++k) {
      const double weight = coeff * eval_weight(psi, distance(particle(pos, i, dim), particle(pos, k, dim)));
      const std::size_t oi = static_cast<std::size_t>(i) * dim;
      const std::size_t ok = static_cast<std::size_t>(k) * dim;
      for (int c = 0; c < dim; ++c) {
        const double f = weight * (vel[ok + c] - vel[oi + c]);
        acc[oi + c] += f;
        acc[ok + c] -= f;
      }
    }
  }
}

inline void add_rayleigh(const std::vector<double>& vel, int n, int dim, double delta,
                         std::vector<double>& acc) {
  if (delta == 0.0) return;
  for (int i = 0; i < n; ++i) {
    const double speed2 = norm_squared(particle(vel, i, dim));
    const std::size_t oi = static_cast<std::size_t>(i) * dim;
    for (int c = 0; c < dim; ++c) acc[oi + c] += delta * vel[oi + c] * (1.0 - speed2);
  }
}

}  // namespace detail

inline StateDerivative rhs(const SystemState& s, const ModelParams& p) {
  check_shape(s, p);
  const int dim = p.dim;
  StateDerivative d;
  d.x = s.v;
  d.y = s.w;
  d.v.assign(s.v.size(), 0.0);
  d.w.assign(s.w.size(), 0.0);

  detail::add_intra(s.x, s.v, p.n1, dim, p.psi_s, p.kappa_s / p.n1, d.v);
  detail::add_intra(s.y, s.w, p.n2, dim, p.psi_s, p.kappa_s / p.n2, d.w);

  // Repulsion: v_i gets -(kd/N2) psi (w_j - v_i), w_j gets -(kd/N1) psi (v_i - w_j).
  if (p.kappa_d != 0.0) {
    const double cv = p.kappa_d / p.n2;
    const double cw = p.kappa_d / p.n1;
    for (int i = 0; i < p.n1; ++i) {
      const std::size_t oi = static_cast<std::size_t>(i) * dim;
      for (int j = 0; j < p.n2; ++j) {
        const std::size_t oj = static_cast<std::size_t>(j) * dim;
        const double psi = eval_weight(p.psi_d, distance(particle(s.x, i, dim), particle(s.y, j, dim)));
        for (int c = 0; c < dim; ++c) {
          const double rel = s.w[oj + c] - s.v[oi + c];
          d.v[oi + c] -= cv * psi * rel;
          d.w[oj + c] += cw * psi * rel;
        }
      }
    }
  }

  detail::add_rayleigh(s.v, p.n1, dim, p.delta, d.v);
  detail::add_rayleigh(s.w, p.n2, dim, p.delta, d.w);
  return d;
}

}  // namespace bicluster
