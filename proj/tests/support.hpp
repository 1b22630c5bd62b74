#pragma once

// Random generators for the property tests, driven by the same SplitMix64
// stream the CLI uses so failures are reproducible from the printed seed.

#include <cmath>
#include <cstdint>
#include <vector>

#include "bicluster/bicluster.hpp"
#include "bicluster/cli/random.hpp"

namespace testgen {

using bicluster::ModelParams;
using bicluster::SystemState;
using bicluster::WeightSpec;
using bicluster::cli::SplitMix64;

inline int int_in(SplitMix64& g, int lo, int hi) {
  return lo + static_cast<int>(g.next() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline WeightSpec weight(SplitMix64& g) {
  const double a = g.uniform(0.2, 2.0);
  switch (int_in(g, 0, 2)) {
    case 0: return WeightSpec::constant(a);
    case 1: return WeightSpec::power_law(a, g.uniform(0.0, 2.0));
    default: return WeightSpec::exponential(a, g.uniform(0.0, 3.0));
  }
}

inline ModelParams params(SplitMix64& g, bool with_friction) {
  ModelParams p;
  p.n1 = int_in(g, 1, 6);
  p.n2 = int_in(g, 1, 6);
  p.dim = int_in(g, 1, 3);
  p.kappa_s = g.uniform(0.0, 5.0);
  p.kappa_d = g.uniform(0.0, 5.0);
  p.delta = with_friction ? g.uniform(0.0, 2.0) : 0.0;
  p.psi_s = weight(g);
  p.psi_d = weight(g);
  return p;
}

inline std::vector<double> coords(SplitMix64& g, int n, int dim, double scale) {
  std::vector<double> out(static_cast<std::size_t>(n * dim));
  for (auto& c : out) c = g.uniform(-scale, scale);
  return out;
}

inline SystemState state(SplitMix64& g, const ModelParams& p) {
  return {coords(g, p.n1, p.dim, 2.0), coords(g, p.n1, p.dim, 1.5), coords(g, p.n2, p.dim, 2.0),
          coords(g, p.n2, p.dim, 1.5)};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace testgen
