#pragma once

#include <cstdint>
#include <vector>

#include "bicluster/model.hpp"

namespace bicluster::cli {

// SplitMix64 (Steele, Lea, Flood). Pinned so a seed produces the same
// initial data in every implementation.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

enum class InitKind { RandomBox, Explicit };
enum class Centering { PerGroup, Global };

struct Box {
  std::vector<double> lo, hi;  // empty means [0, 1] on every axis

  double lower(int c) const { return lo.empty() ? 0.0 : lo[static_cast<std::size_t>(c)]; }
  double upper(int c) const { return hi.empty() ? 1.0 : hi[static_cast<std::size_t>(c)]; }
  bool operator==(const Box&) const = default;
};

struct InitSpec {
  InitKind kind = InitKind::RandomBox;
  Box box_x, box_y;
  double velocity_scale = 1.0;
  Centering velocity_centering = Centering::PerGroup;
  // Added to every velocity of the group after centering; empty means zero.
  std::vector<double> velocity_offset_v, velocity_offset_w;
  SystemState explicit_state;

  bool operator==(const InitSpec&) const = default;
};

inline std::vector<std::string> validate_init(const InitSpec& init, const ModelParams& p) {
  std::vector<std::string> out;
  const auto d = static_cast<std::size_t>(p.dim);
  for (const auto* box : {&init.box_x, &init.box_y}) {
    if ((!box->lo.empty() && box->lo.size() != d) || (!box->hi.empty() && box->hi.size() != d)) {
      out.emplace_back("init box dimension == model.dim");
      continue;
    }
    for (int c = 0; c < p.dim; ++c)
      if (!(box->lower(c) <= box->upper(c))) out.emplace_back("init box lo <= hi");
  }
  if (!(init.velocity_scale > 0.0)) out.emplace_back("init.velocity_scale > 0");
  for (const auto* off : {&init.velocity_offset_v, &init.velocity_offset_w})
    if (!off->empty() && off->size() != d) out.emplace_back("init velocity offset dimension == model.dim");
  if (init.kind == InitKind::Explicit) {
    try {
      check_shape(init.explicit_state, p);
    } catch (const StructuralError&) {
      out.emplace_back("init.explicit state shape matches model");
    }
  }
  return out;
}

namespace detail {

inline void center(std::vector<double>& vel, const std::vector<double>& mean, int n, int dim) {
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) vel[static_cast<std::size_t>(i) * dim + c] -= mean[c];
}

inline void shift(std::vector<double>& vel, const std::vector<double>& offset, int n, int dim) {
  if (offset.empty()) return;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) vel[static_cast<std::size_t>(i) * dim + c] += offset[c];
}

inline std::vector<double> mean_of(const std::vector<double>& arr, int n, int dim) {
  std::vector<double> m(static_cast<std::size_t>(dim), 0.0);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) m[c] += arr[static_cast<std::size_t>(i) * dim + c];
  for (double& c : m) c /= n;
  return m;
}

}  // namespace detail

// Draw order: x, y, v, w, particle-major then axis.
inline SystemState generate_initial(const InitSpec& init, const ModelParams& p, std::uint64_t seed) {
  const auto problems = validate_init(init, p);
  if (!problems.empty()) throw PreconditionError("generate_initial: " + problems.front());
  if (init.kind == InitKind::Explicit) return init.explicit_state;

  SplitMix64 rng(seed);
  SystemState s = SystemState::zeros(p);
  const int dim = p.dim;
  auto fill_positions = [&](std::vector<double>& arr, int n, const Box& box) {
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < dim; ++c) arr[static_cast<std::size_t>(i) * dim + c] = rng.uniform(box.lower(c), box.upper(c));
  };
  auto fill_velocities = [&](std::vector<double>& arr) {
    for (double& c : arr) c = rng.uniform(-init.velocity_scale, init.velocity_scale);
  };
  fill_positions(s.x, p.n1, init.box_x);
  fill_positions(s.y, p.n2, init.box_y);
  fill_velocities(s.v);
  fill_velocities(s.w);

  if (init.velocity_centering == Centering::PerGroup) {
    detail::center(s.v, detail::mean_of(s.v, p.n1, dim), p.n1, dim);
    detail::center(s.w, detail::mean_of(s.w, p.n2, dim), p.n2, dim);
  } else {
    std::vector<double> m(static_cast<std::size_t>(dim), 0.0);
    const auto mv = detail::mean_of(s.v, p.n1, dim);
    const auto mw = detail::mean_of(s.w, p.n2, dim);
    for (int c = 0; c < dim; ++c) m[c] = (p.n1 * mv[c] + p.n2 * mw[c]) / (p.n1 + p.n2);
    detail::center(s.v, m, p.n1, dim);
    detail::center(s.w, m, p.n2, dim);
  }
  detail::shift(s.v, init.velocity_offset_v, p.n1, dim);
  detail::shift(s.w, init.velocity_offset_w, p.n2, dim);
  return s;
}

}  // namespace bicluster::cli
