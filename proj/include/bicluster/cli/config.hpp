#pragma once

// Run configuration and its two textual forms.
//
// Text form: one `key = value` per line, `#` starts a comment, keys are dotted
// paths (model.kappa_s = 10), vectors are comma-separated (init.box_x.lo = 0, 0).
// JSON form: the same keys nested as objects. Both are produced from one
// canonical JSON tree, so either can be fed back to the parser.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bicluster/certificates.hpp"
#include "bicluster/cli/random.hpp"
#include "bicluster/stages.hpp"

namespace bicluster::cli {

using json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "0.1.0";

inline const std::vector<std::string>& known_certificates() {
  static const std::vector<std::string> names{"theorem31", "lyapunov", "theorem41", "theorem51"};
  return names;
}

struct CertificateOptions {
  Theorem31Tolerances theorem31;
  double lyapunov_tol = 1e-2;
  Theorem41Options theorem41;
  Theorem51Options theorem51;

  bool operator==(const CertificateOptions& o) const {
    return theorem31.envelope == o.theorem31.envelope && theorem31.macro == o.theorem31.macro &&
           lyapunov_tol == o.lyapunov_tol && theorem41.eps0 == o.theorem41.eps0 &&
           theorem41.eps0_tilde == o.theorem41.eps0_tilde && theorem41.tol == o.theorem41.tol &&
           theorem51.tol == o.theorem51.tol;
  }
};

struct RunConfig {
  std::string name = "custom";
  ModelParams model;
  double dt = 1e-3;
  double t_end = 10.0;
  int sample_stride = 10;
  InitSpec init;
  std::uint64_t seed = 42;
  std::string csv_path = "frames.csv";
  std::string json_path = "summary.json";
  bool dump_states = false;
  std::vector<std::string> certificates = known_certificates();
  CertificateOptions cert_options;
  StageThresholds stages;

  SimConfig sim_config(const SystemState& initial) const { return {model, initial, dt, t_end, sample_stride}; }

  bool operator==(const RunConfig& o) const {
    return name == o.name && model == o.model && dt == o.dt && t_end == o.t_end &&
           sample_stride == o.sample_stride && init == o.init && seed == o.seed && csv_path == o.csv_path &&
           json_path == o.json_path && dump_states == o.dump_states && certificates == o.certificates &&
           cert_options == o.cert_options && stages.eps_v == o.stages.eps_v && stages.eps_x == o.stages.eps_x &&
           stages.eps_f == o.stages.eps_f;
  }
};

// ---------------------------------------------------------------------------
// Value parsing

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("invalid number for '" + key + "': '" + text + "'");
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  Int v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("invalid integer for '" + key + "': '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("invalid boolean for '" + key + "': '" + text + "'");
}

inline std::vector<double> parse_vector(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (const auto& item : split(text, ',')) out.push_back(parse_double(key, item));
  return out;
}

inline WeightKind parse_weight_kind(const std::string& key, const std::string& text) {
  try {
    return weight_kind_from_string(trim(text));
  } catch (const DomainError&) {
    throw ConfigError("invalid weight kind for '" + key + "': '" + text + "' (constant, power_law, exponential)");
  }
}

inline void apply_weight(WeightSpec& w, const std::string& field, const std::string& key, const std::string& value) {
  if (field == "kind") w.kind = parse_weight_kind(key, value);
  else if (field == "amplitude") w.amplitude = parse_double(key, value);
  else if (field == "beta") w.beta = parse_double(key, value);
  else throw ConfigError("unknown key '" + key + "'");
}

}  // namespace detail

/// Sets one dotted key from its text value. Throws ConfigError on unknown
/// keys or unparsable values; semantic validation happens separately.
inline void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& value) {
  using namespace detail;
  const std::string key = trim(raw_key);
  auto& m = c.model;
  auto& in = c.init;
  if (key == "name") c.name = trim(value);
  else if (key == "seed") c.seed = parse_int<std::uint64_t>(key, value);
  else if (key == "model.n1") m.n1 = parse_int<int>(key, value);
  else if (key == "model.n2") m.n2 = parse_int<int>(key, value);
  else if (key == "model.dim") m.dim = parse_int<int>(key, value);
  else if (key == "model.kappa_s") m.kappa_s = parse_double(key, value);
  else if (key == "model.kappa_d") m.kappa_d = parse_double(key, value);
  else if (key == "model.delta") m.delta = parse_double(key, value);
  else if (key.rfind("model.psi_s.", 0) == 0) apply_weight(m.psi_s, key.substr(12), key, value);
  else if (key.rfind("model.psi_d.", 0) == 0) apply_weight(m.psi_d, key.substr(12), key, value);
  else if (key == "sim.dt") c.dt = parse_double(key, value);
  else if (key == "sim.t_end") c.t_end = parse_double(key, value);
  else if (key == "sim.sample_stride") c.sample_stride = parse_int<int>(key, value);
  else if (key == "init.kind") {
    const auto v = trim(value);
    if (v == "random_box") in.kind = InitKind::RandomBox;
    else if (v == "explicit") in.kind = InitKind::Explicit;
    else throw ConfigError("invalid init.kind '" + v + "' (random_box, explicit)");
  }
  else if (key == "init.box_x.lo") in.box_x.lo = parse_vector(key, value);
  else if (key == "init.box_x.hi") in.box_x.hi = parse_vector(key, value);
  else if (key == "init.box_y.lo") in.box_y.lo = parse_vector(key, value);
  else if (key == "init.box_y.hi") in.box_y.hi = parse_vector(key, value);
  else if (key == "init.velocity_scale") in.velocity_scale = parse_double(key, value);
  else if (key == "init.velocity_centering") {
    const auto v = trim(value);
    if (v == "per_group") in.velocity_centering = Centering::PerGroup;
    else if (v == "global") in.velocity_centering = Centering::Global;
    else throw ConfigError("invalid init.velocity_centering '" + v + "' (per_group, global)");
  }
  else if (key == "init.velocity_offset_v") in.velocity_offset_v = parse_vector(key, value);
  else if (key == "init.velocity_offset_w") in.velocity_offset_w = parse_vector(key, value);
  else if (key == "init.explicit.x") in.explicit_state.x = parse_vector(key, value);
  else if (key == "init.explicit.v") in.explicit_state.v = parse_vector(key, value);
  else if (key == "init.explicit.y") in.explicit_state.y = parse_vector(key, value);
  else if (key == "init.explicit.w") in.explicit_state.w = parse_vector(key, value);
  else if (key == "outputs.csv") c.csv_path = trim(value);
  else if (key == "outputs.json") c.json_path = trim(value);
  else if (key == "outputs.dump_states") c.dump_states = parse_bool(key, value);
  else if (key == "certificates.enabled") {
    c.certificates.clear();
    const auto& known = known_certificates();
    for (const auto& n : split(value, ',')) {
      if (n.empty()) continue;
      if (std::find(known.begin(), known.end(), n) == known.end())
        throw ConfigError("certificates.enabled: unknown certificate '" + n + "'");
      c.certificates.push_back(n);
    }
  }
  else if (key == "certificates.theorem31.envelope_tol") c.cert_options.theorem31.envelope = parse_double(key, value);
  else if (key == "certificates.theorem31.macro_tol") c.cert_options.theorem31.macro = parse_double(key, value);
  else if (key == "certificates.lyapunov.tol") c.cert_options.lyapunov_tol = parse_double(key, value);
  else if (key == "certificates.theorem41.eps0") c.cert_options.theorem41.eps0 = parse_double(key, value);
  else if (key == "certificates.theorem41.eps0_tilde") c.cert_options.theorem41.eps0_tilde = parse_double(key, value);
  else if (key == "certificates.theorem41.tol") c.cert_options.theorem41.tol = parse_double(key, value);
  else if (key == "certificates.theorem51.tol") c.cert_options.theorem51.tol = parse_double(key, value);
  else if (key == "stages.eps_v") c.stages.eps_v = parse_double(key, value);
  else if (key == "stages.eps_x") c.stages.eps_x = parse_double(key, value);
  else if (key == "stages.eps_f") c.stages.eps_f = parse_double(key, value);
  else throw ConfigError("unknown key '" + key + "'");
}

inline std::vector<std::string> validate_run_config(const RunConfig& c) {
  std::vector<std::string> out = validate_sim_config(c.sim_config(SystemState{}));
  for (auto& s : validate_init(c.init, c.model)) out.push_back(std::move(s));
  for (const auto& n : c.certificates)
    if (std::find(known_certificates().begin(), known_certificates().end(), n) == known_certificates().end())
      out.push_back("unknown certificate '" + n + "'");
  if (c.csv_path.empty()) out.emplace_back("outputs.csv is not empty");
  if (c.json_path.empty()) out.emplace_back("outputs.json is not empty");
  return out;
}

// ---------------------------------------------------------------------------
// Canonical tree

inline json config_to_json(const RunConfig& c) {
  auto weight = [](const WeightSpec& w) {
    return json{{"kind", to_string(w.kind)}, {"amplitude", w.amplitude}, {"beta", w.beta}};
  };
  json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["model"] = {{"n1", c.model.n1},           {"n2", c.model.n2},         {"dim", c.model.dim},
                {"kappa_s", c.model.kappa_s}, {"kappa_d", c.model.kappa_d}, {"delta", c.model.delta},
                {"psi_s", weight(c.model.psi_s)}, {"psi_d", weight(c.model.psi_d)}};
  j["sim"] = {{"dt", c.dt}, {"t_end", c.t_end}, {"sample_stride", c.sample_stride}};
  json init;
  init["kind"] = c.init.kind == InitKind::RandomBox ? "random_box" : "explicit";
  init["box_x"] = {{"lo", c.init.box_x.lo}, {"hi", c.init.box_x.hi}};
  init["box_y"] = {{"lo", c.init.box_y.lo}, {"hi", c.init.box_y.hi}};
  init["velocity_scale"] = c.init.velocity_scale;
  init["velocity_centering"] = c.init.velocity_centering == Centering::PerGroup ? "per_group" : "global";
  init["velocity_offset_v"] = c.init.velocity_offset_v;
  init["velocity_offset_w"] = c.init.velocity_offset_w;
  if (c.init.kind == InitKind::Explicit) {
    const auto& s = c.init.explicit_state;
    init["explicit"] = {{"x", s.x}, {"v", s.v}, {"y", s.y}, {"w", s.w}};
  }
  j["init"] = init;
  j["outputs"] = {{"csv", c.csv_path}, {"json", c.json_path}, {"dump_states", c.dump_states}};
  const auto& o = c.cert_options;
  j["certificates"] = {
      {"enabled", c.certificates},
      {"theorem31", {{"envelope_tol", o.theorem31.envelope}, {"macro_tol", o.theorem31.macro}}},
      {"lyapunov", {{"tol", o.lyapunov_tol}}},
      {"theorem41", {{"eps0", o.theorem41.eps0}, {"eps0_tilde", o.theorem41.eps0_tilde}, {"tol", o.theorem41.tol}}},
      {"theorem51", {{"tol", o.theorem51.tol}}}};
  j["stages"] = {{"eps_v", c.stages.eps_v}, {"eps_x", c.stages.eps_x}, {"eps_f", c.stages.eps_f}};
  return j;
}

namespace detail {

inline std::string leaf_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += leaf_text(v[i]);
    }
    return s;
  }
  return v.dump();
}

inline void flatten_into(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) flatten_into(v, key, out);
    else out.emplace_back(key, leaf_text(v));
  }
}

}  // namespace detail

inline std::vector<std::pair<std::string, std::string>> flatten(const json& j) {
  std::vector<std::pair<std::string, std::string>> out;
  detail::flatten_into(j, "", out);
  return out;
}

inline std::string to_config_text(const RunConfig& c) {
  std::string s;
  for (const auto& [k, v] : flatten(config_to_json(c))) s += k + " = " + v + "\n";
  return s;
}

inline void apply_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("JSON config must be an object");
  for (const auto& [k, v] : flatten(j)) apply_setting(c, k, v);
}

inline void apply_text(RunConfig& c, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    try {
      apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

/// Applies a config file on top of `c`. A file whose first non-blank
/// character is '{' is read as JSON; a run summary's "config" member is used
/// when present, so summaries can be replayed directly.
inline void apply_file(RunConfig& c, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("invalid JSON in '" + path + "': " + e.what());
    }
    apply_json(c, j.contains("config") ? j["config"] : j);
  } else {
    apply_text(c, text);
  }
}

inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  apply_json(c, j);
  return c;
}

}  // namespace bicluster::cli
