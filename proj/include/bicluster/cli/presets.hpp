#pragma once

// Named experiment configurations: the numerical examples, the small exact
// systems, one configuration per flocking theorem and negative controls that
// each certificate must reject.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bicluster/cli/config.hpp"

namespace bicluster::cli {

namespace detail {

// N1 = N2 = 50 in the unit square, ks = kd = 10, psi = (1 + r^2)^{-0.4}.
inline RunConfig mixed_example(const std::string& name, double delta, double t_end) {
  RunConfig c;
  c.name = name;
  c.model.n1 = 50;
  c.model.n2 = 50;
  c.model.dim = 2;
  c.model.kappa_s = 10.0;
  c.model.kappa_d = 10.0;
  c.model.delta = delta;
  c.model.psi_s = WeightSpec::power_law(1.0, 0.4);
  c.model.psi_d = WeightSpec::power_law(1.0, 0.4);
  c.dt = 1e-3;
  c.t_end = t_end;
  c.sample_stride = 10;
  c.seed = 1;
  return c;
}

inline RunConfig theorem31(const std::string& name, double kappa_s, double kappa_d) {
  RunConfig c;
  c.name = name;
  c.model = {50, 50, 2, kappa_s, kappa_d, 0.0, WeightSpec::power_law(1.0, 0.4), WeightSpec::constant(1.0)};
  c.init.velocity_offset_v = {0.5, 0.0};
  c.init.velocity_offset_w = {-0.5, 0.0};
  c.dt = 1e-3;
  c.t_end = 5.0;
  c.sample_stride = 10;
  c.seed = 7;
  c.certificates = {"theorem31", "lyapunov"};
  return c;
}

inline RunConfig theorem41(const std::string& name, const WeightSpec& psi_d) {
  RunConfig c;
  c.name = name;
  c.model = {20, 20, 2, 10.0, 0.1, 0.0, WeightSpec::constant(1.0), psi_d};
  c.init.velocity_offset_v = {1.5, 0.0};
  c.init.velocity_offset_w = {-1.5, 0.0};
  c.dt = 1e-3;
  c.t_end = 10.0;
  c.sample_stride = 10;
  c.seed = 11;
  c.certificates = {"theorem41"};
  return c;
}

inline RunConfig theorem51(const std::string& name, double kappa_s) {
  RunConfig c;
  c.name = name;
  c.model = {20, 20, 2, kappa_s, 0.5, 0.5, WeightSpec::constant(1.0), WeightSpec::exponential(1.0, 2.0)};
  c.init.velocity_offset_v = {1.0, 0.0};
  c.init.velocity_offset_w = {-1.0, 0.0};
  c.dt = 1e-3;
  c.t_end = 10.0;
  c.sample_stride = 10;
  c.seed = 11;
  c.certificates = {"theorem51"};
  return c;
}

struct PresetEntry {
  std::string description;
  std::function<RunConfig()> make;
};

inline const std::map<std::string, PresetEntry>& preset_table() {
  static const std::map<std::string, PresetEntry> table{
      {"example-6-1",
       {"delta = 0, mixed start: kinetic energy grows (t_end capped)",
        [] { return mixed_example("example-6-1", 0.0, 5.0); }}},
      {"example-6-2-delta-1",
       {"delta = 1, mixed start: kinetic energy bounded, not monotone",
        [] { return mixed_example("example-6-2-delta-1", 1.0, 5.0); }}},
      {"example-6-2-delta-0.1",
       {"delta = 0.1, mixed start: kinetic energy bounded, not monotone",
        [] { return mixed_example("example-6-2-delta-0.1", 0.1, 5.0); }}},
      {"example-6-3",
       {"delta = 0, three-stage bi-clustering",
        [] {
          auto c = mixed_example("example-6-3", 0.0, 3.0);
          c.stages.eps_f = 1e-2;
          return c;
        }}},
      {"example-6-4",
       {"delta = 1, three-stage bi-clustering",
        [] {
          auto c = mixed_example("example-6-4", 1.0, 3.0);
          c.stages.eps_f = 1e-2;
          return c;
        }}},
      {"two-particle",
       {"N1 = N2 = 1, constant weights: exact exponential separation",
        [] {
          RunConfig c;
          c.name = "two-particle";
          c.model = {1, 1, 1, 1.0, 1.0, 0.0, WeightSpec::constant(1.0), WeightSpec::constant(1.0)};
          c.init.kind = InitKind::Explicit;
          c.init.explicit_state = {{0.0}, {2.0}, {0.0}, {0.0}};
          c.dt = 1e-3;
          c.t_end = 1.0;
          c.sample_stride = 10;
          c.certificates = {};
          return c;
        }}},
      {"three-particle",
       {"(N1, N2) = (2, 1), constant weights, symmetric start: u1 -> 0 iff kappa_s > kappa_d",
        [] {
          RunConfig c;
          c.name = "three-particle";
          c.model = {2, 1, 1, 4.0, 2.0, 0.0, WeightSpec::constant(1.0), WeightSpec::constant(1.0)};
          c.init.kind = InitKind::Explicit;
          c.init.explicit_state = {{-0.5, 0.5}, {1.0, -1.0}, {0.0}, {0.0}};
          c.dt = 1e-2;
          c.t_end = 150.0;
          c.sample_stride = 100;
          c.certificates = {};
          return c;
        }}},
      {"theorem-3-1",
       {"constant inter weight, long-range intra weight, weak repulsion",
        [] { return theorem31("theorem-3-1", 5.0, 0.1); }}},
      {"theorem-3-1-strong-repulsion",
       {"negative control: repulsion too strong for the diameter envelopes",
        [] { return theorem31("theorem-3-1-strong-repulsion", 2.0, 1.0); }}},
      {"theorem-3-1-infeasible",
       {"negative control: velocity spread exceeds the integrable intra weight",
        [] {
          auto c = theorem31("theorem-3-1-infeasible", 1.0, 0.1);
          c.model.psi_s = WeightSpec::power_law(1.0, 1.0);
          c.init.velocity_scale = 3.0;
          c.t_end = 1.0;
          return c;
        }}},
      {"theorem-4-1",
       {"delta = 0, short-range inter weight, strong intra coupling",
        [] { return theorem41("theorem-4-1", WeightSpec::exponential(1.0, 5.0)); }}},
      {"theorem-4-1-constant-inter",
       {"negative control: constant inter weight never decays",
        [] { return theorem41("theorem-4-1-constant-inter", WeightSpec::constant(1.0)); }}},
      {"theorem-5-1",
       {"delta = 0.5, intra coupling outweighs repulsion and friction",
        [] { return theorem51("theorem-5-1", 20.0); }}},
      {"theorem-5-1-no-intra",
       {"negative control: kappa_s = 0",
        [] { return theorem51("theorem-5-1-no-intra", 0.0); }}},
  };
  return table;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, entry] : detail::preset_table()) names.push_back(name);
  return names;
}

inline std::string preset_description(const std::string& name) {
  const auto& t = detail::preset_table();
  const auto it = t.find(name);
  return it == t.end() ? std::string() : it->second.description;
}

inline RunConfig preset(const std::string& name) {
  const auto& t = detail::preset_table();
  const auto it = t.find(name);
  if (it == t.end()) {
    std::string msg = "unknown preset '" + name + "'; available:";
    for (const auto& n : preset_names()) msg += " " + n;
    throw ConfigError(msg);
  }
  return it->second.make();
}

}  // namespace bicluster::cli
