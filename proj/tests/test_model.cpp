#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support.hpp"

using namespace bicluster;
using Catch::Approx;
using testgen::SplitMix64;

namespace {

// Straightforward per-particle evaluation of the model, written against
// nested vectors so it shares no indexing code with rhs().
using Vec = std::vector<double>;
using Cloud = std::vector<Vec>;

Cloud unpack(const std::vector<double>& flat, int n, int dim) {
  Cloud out(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(dim)));
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) out[i][c] = flat[static_cast<std::size_t>(i * dim + c)];
  return out;
}

double dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(s);
}

Cloud reference_accel(const Cloud& pos, const Cloud& vel, const Cloud& opos, const Cloud& ovel, double ks,
                      double kd, double delta, const WeightSpec& ps, const WeightSpec& pd) {
  const double n_same = static_cast<double>(pos.size());
  const double n_other = static_cast<double>(opos.size());
  Cloud acc(pos.size(), Vec(pos[0].size(), 0.0));
  for (std::size_t i = 0; i < pos.size(); ++i) {
    double speed2 = 0.0;
    for (double c : vel[i]) speed2 += c * c;
    for (std::size_t c = 0; c < vel[i].size(); ++c) {
      double intra = 0.0, inter = 0.0;
      for (std::size_t k = 0; k < pos.size(); ++k) intra += eval_weight(ps, dist(pos[k], pos[i])) * (vel[k][c] - vel[i][c]);
      for (std::size_t k = 0; k < opos.size(); ++k)
        inter += eval_weight(pd, dist(opos[k], pos[i])) * (ovel[k][c] - vel[i][c]);
      acc[i][c] = ks / n_same * intra - kd / n_other * inter + delta * vel[i][c] * (1.0 - speed2);
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("eval_weight examples", "[model]") {
  CHECK(eval_weight(WeightSpec::constant(1.0), 7.3) == 1.0);
  CHECK(eval_weight(WeightSpec::power_law(1.0, 0.4), 0.0) == 1.0);
  CHECK(eval_weight(WeightSpec::power_law(1.0, 0.4), 1.0) == Approx(0.7578582833).epsilon(1e-9));
  CHECK(eval_weight(WeightSpec::exponential(1.0, 2.0), 1.0) == Approx(0.1353352832).epsilon(1e-9));
  CHECK_THROWS_AS(eval_weight(WeightSpec::constant(1.0), -1e-9), DomainError);
}

TEST_CASE("eval_weight is bounded, nonincreasing and decays for non-constant kinds", "[model][property]") {
  SplitMix64 g(101);
  for (int trial = 0; trial < 500; ++trial) {
    const auto w = testgen::weight(g);
    const double r1 = g.uniform(0.0, 10.0);
    const double r2 = r1 + g.uniform(0.0, 10.0);
    INFO("trial " << trial);
    CHECK(eval_weight(w, 0.0) == w.amplitude);
    CHECK(eval_weight(w, r2) <= eval_weight(w, r1));
    CHECK(eval_weight(w, r1) >= 0.0);
    CHECK(eval_weight(w, r1) <= w.amplitude);
    if (w.decays_to_zero()) {
      CHECK(eval_weight(w, r2 + 1.0) < eval_weight(w, r1));
      if (w.beta >= 0.05) CHECK(eval_weight(w, 1e150) < 1e-3 * w.amplitude);
    }
  }
}

TEST_CASE("rhs examples", "[model]") {
  ModelParams p{1, 1, 1, 3.7, 1.0, 0.0, WeightSpec::constant(1.0), WeightSpec::constant(1.0)};
  const auto d = rhs({{0.0}, {1.0}, {0.0}, {0.0}}, p);
  CHECK(d.v[0] == 1.0);
  CHECK(d.w[0] == -1.0);
  CHECK(d.x[0] == 1.0);
  CHECK(d.y[0] == 0.0);

  ModelParams aligned{3, 2, 2, 2.0, 0.0, 0.0, WeightSpec::power_law(1.0, 0.4), WeightSpec::constant(1.0)};
  SystemState s{{0, 0, 1, 0, 0, 2}, {0.3, -0.2, 0.3, -0.2, 0.3, -0.2}, {5, 5, 6, 5}, {1, 1, -1, 2}};
  const auto da = rhs(s, aligned);
  for (double a : da.v) CHECK(a == 0.0);

  ModelParams friction{1, 1, 2, 0.0, 0.0, 1.0, WeightSpec::constant(1.0), WeightSpec::constant(1.0)};
  const auto unit = rhs({{0, 0}, {1, 0}, {0, 0}, {0, 0}}, friction);
  CHECK(unit.v[0] == 0.0);
  CHECK(unit.v[1] == 0.0);
  const auto fast = rhs({{0, 0}, {2, 0}, {0, 0}, {0, 0}}, friction);
  CHECK(fast.v[0] == -6.0);
  CHECK(fast.v[1] == 0.0);

  CHECK_THROWS_AS(rhs({{0.0, 1.0}, {1.0}, {0.0}, {0.0}}, p), StructuralError);
}

TEST_CASE("rhs agrees with a per-particle reference evaluation", "[model][property]") {
  SplitMix64 g(202);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = testgen::params(g, true);
    const auto s = testgen::state(g, p);
    const auto d = rhs(s, p);
    const auto x = unpack(s.x, p.n1, p.dim), v = unpack(s.v, p.n1, p.dim);
    const auto y = unpack(s.y, p.n2, p.dim), w = unpack(s.w, p.n2, p.dim);
    const auto av = reference_accel(x, v, y, w, p.kappa_s, p.kappa_d, p.delta, p.psi_s, p.psi_d);
    const auto aw = reference_accel(y, w, x, v, p.kappa_s, p.kappa_d, p.delta, p.psi_s, p.psi_d);
    INFO("trial " << trial);
    for (int i = 0; i < p.n1; ++i)
      for (int c = 0; c < p.dim; ++c) CHECK(d.v[i * p.dim + c] == Approx(av[i][c]).margin(1e-12));
    for (int j = 0; j < p.n2; ++j)
      for (int c = 0; c < p.dim; ++c) CHECK(d.w[j * p.dim + c] == Approx(aw[j][c]).margin(1e-12));
    CHECK(d.x == s.v);
    CHECK(d.y == s.w);
  }
}

TEST_CASE("validate_params", "[model]") {
  ModelParams ok{50, 50, 2, 10.0, 10.0, 0.0, WeightSpec::power_law(1.0, 0.4), WeightSpec::power_law(1.0, 0.4)};
  CHECK(validate_params(ok).empty());
  auto empty_group = ok;
  empty_group.n1 = 0;
  CHECK(validate_params(empty_group) == std::vector<std::string>{"n1 >= 1"});
  auto negative = ok;
  negative.kappa_s = -1.0;
  CHECK(validate_params(negative) == std::vector<std::string>{"kappa_s >= 0"});
  auto bad_weight = ok;
  bad_weight.psi_d.amplitude = 0.0;
  CHECK(validate_params(bad_weight) == std::vector<std::string>{"psi_d.amplitude > 0"});
}

TEST_CASE("group-mean momentum derivative vanishes without friction", "[model][property]") {
  SplitMix64 g(303);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = testgen::params(g, false);
    const auto s = testgen::state(g, p);
    const auto d = rhs(s, p);
    INFO("trial " << trial);
    for (int c = 0; c < p.dim; ++c) {
      double dm = 0.0, scale = 0.0;
      for (int i = 0; i < p.n1; ++i) {
        dm += d.v[i * p.dim + c] / p.n1;
        scale += std::abs(d.v[i * p.dim + c]) / p.n1;
      }
      for (int j = 0; j < p.n2; ++j) {
        dm += d.w[j * p.dim + c] / p.n2;
        scale += std::abs(d.w[j * p.dim + c]) / p.n2;
      }
      CHECK(std::abs(dm) <= 1e-13 * (1.0 + scale));
    }
  }
}

TEST_CASE("intra-group alignment sums to zero within each group", "[model][property]") {
  SplitMix64 g(404);
  for (int trial = 0; trial < 300; ++trial) {
    auto p = testgen::params(g, false);
    p.kappa_d = 0.0;
    const auto s = testgen::state(g, p);
    const auto d = rhs(s, p);
    for (int c = 0; c < p.dim; ++c) {
      double sv = 0.0, sw = 0.0, scale = 0.0;
      for (int i = 0; i < p.n1; ++i) sv += d.v[i * p.dim + c], scale += std::abs(d.v[i * p.dim + c]);
      for (int j = 0; j < p.n2; ++j) sw += d.w[j * p.dim + c], scale += std::abs(d.w[j * p.dim + c]);
      CHECK(std::abs(sv) <= 1e-13 * (1.0 + scale));
      CHECK(std::abs(sw) <= 1e-13 * (1.0 + scale));
    }
  }
}

TEST_CASE("rhs is translation-equivariant in positions for constant weights", "[model][property]") {
  SplitMix64 g(505);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = testgen::params(g, true);
    p.psi_s = WeightSpec::constant(g.uniform(0.5, 2.0));
    p.psi_d = WeightSpec::constant(g.uniform(0.5, 2.0));
    const auto s = testgen::state(g, p);
    auto shifted = s;
    const auto shift = testgen::coords(g, 1, p.dim, 10.0);
    for (std::size_t k = 0; k < shifted.x.size(); ++k) shifted.x[k] += shift[k % p.dim];
    for (std::size_t k = 0; k < shifted.y.size(); ++k) shifted.y[k] += shift[k % p.dim];
    const auto a = rhs(s, p), b = rhs(shifted, p);
    CHECK(testgen::max_abs_diff(a.v, b.v) == 0.0);
    CHECK(testgen::max_abs_diff(a.w, b.w) == 0.0);
  }
}

TEST_CASE("rhs is permutation-equivariant within each group", "[model][property]") {
  SplitMix64 g(606);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = testgen::params(g, true);
    const auto s = testgen::state(g, p);
    std::vector<int> perm(static_cast<std::size_t>(p.n1));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = p.n1 - 1; i > 0; --i) std::swap(perm[i], perm[testgen::int_in(g, 0, i)]);
    auto permuted = s;
    for (int i = 0; i < p.n1; ++i)
      for (int c = 0; c < p.dim; ++c) {
        permuted.x[i * p.dim + c] = s.x[perm[i] * p.dim + c];
        permuted.v[i * p.dim + c] = s.v[perm[i] * p.dim + c];
      }
    const auto a = rhs(s, p), b = rhs(permuted, p);
    for (int i = 0; i < p.n1; ++i)
      for (int c = 0; c < p.dim; ++c)
        CHECK(b.v[i * p.dim + c] == Approx(a.v[perm[i] * p.dim + c]).margin(1e-12));
    // Group 2 sees the same set of group-1 particles, so its derivative is unchanged up to summation order.
    CHECK(testgen::max_abs_diff(a.w, b.w) <= 1e-12);
  }
}
