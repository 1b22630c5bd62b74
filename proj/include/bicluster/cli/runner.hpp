#pragma once

// Executes a RunConfig and writes its artifacts: a per-sample CSV of scalar
// diagnostics, an optional per-particle state dump and a JSON summary.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bicluster/certificates.hpp"
#include "bicluster/cli/config.hpp"
#include "bicluster/stages.hpp"

namespace bicluster::cli {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitDivergence = 3, kExitViolation = 4 };

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"t",  "m2", "m2_hat", "center_sep", "dx",          "dv",
                                             "dy", "dw", "min_inter_dist", "psi_d_upper", "psi_s_lower"};
  return cols;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// JSON views

inline json frame_to_json(const DiagnosticsFrame& f) {
  return json{{"m1_v", f.m1_v},
              {"m1_w", f.m1_w},
              {"m2_v", f.m2_v},
              {"m2_w", f.m2_w},
              {"m2", f.m2},
              {"m2_hat", f.m2_hat},
              {"center_sep", f.center_sep},
              {"dx", f.dx},
              {"dv", f.dv},
              {"dy", f.dy},
              {"dw", f.dw},
              {"min_inter_dist", f.min_inter_dist},
              {"max_inter_dist", f.max_inter_dist},
              {"psi_s_lower", f.psi_s_lower},
              {"psi_s_upper", f.psi_s_upper},
              {"psi_d_lower", f.psi_d_lower},
              {"psi_d_upper", f.psi_d_upper},
              {"min_inter_vel_dist", f.min_inter_vel_dist}};
}

inline json optional_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json stages_to_json(const StageReport& r) {
  return json{{"t_velocity_sep", optional_to_json(r.t_velocity_sep)},
              {"t_spatial_sep", optional_to_json(r.t_spatial_sep)},
              {"t_flock", optional_to_json(r.t_flock)},
              {"thresholds", {{"eps_v", r.thresholds.eps_v}, {"eps_x", r.thresholds.eps_x}, {"eps_f", r.thresholds.eps_f}}}};
}

inline json flocking_to_json(const FlockingReport& r) {
  return json{{"sup_dx", r.sup_dx},
              {"sup_dy", r.sup_dy},
              {"terminal_dv", r.terminal_dv},
              {"terminal_dw", r.terminal_dw},
              {"terminal_vel_gap", r.terminal_vel_gap},
              {"min_vel_gap", r.min_vel_gap},
              {"separation_slope", r.separation_slope},
              {"separation_intercept", r.separation_intercept},
              {"separation_log_rate", r.separation_log_rate}};
}

inline json certificate_to_json(const CertificateResult& r) {
  json details = json::object();
  for (const auto& [k, v] : r.details) details[k] = v;
  json j{{"name", r.name},
         {"status", to_string(r.status)},
         {"margin", r.status == CertStatus::NotApplicable ? json(nullptr) : json(r.margin)},
         {"witness_time", optional_to_json(r.witness_time)},
         {"details", details}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

// ---------------------------------------------------------------------------
// Execution

/// Result names produced by the enabled certificate list, in output order.
inline std::vector<std::string> certificate_result_names(const std::vector<std::string>& enabled) {
  std::vector<std::string> out;
  for (const auto& n : enabled) {
    if (n == "theorem31") {
      out.emplace_back("theorem31_hypotheses");
      out.emplace_back("theorem31_conclusions");
    } else {
      out.push_back(n);
    }
  }
  return out;
}

inline std::vector<CertificateResult> evaluate_certificates(const RunConfig& c, const SystemState& initial,
                                                            const Trajectory& traj) {
  std::vector<CertificateResult> out;
  auto guarded = [&](const std::string& name, const std::function<CertificateResult()>& f) {
    try {
      out.push_back(f());
    } catch (const std::exception& e) {
      CertificateResult r;
      r.name = name;
      r.note = e.what();
      out.push_back(r);
    }
  };
  const auto& p = c.model;
  const auto& o = c.cert_options;
  for (const auto& n : c.certificates) {
    if (n == "theorem31") {
      std::optional<CertificateResult> hyp;
      guarded("theorem31_hypotheses", [&] { return *(hyp = check_theorem31_hypotheses(initial, p)); });
      guarded("theorem31_conclusions", [&] {
        if (!hyp || !hyp->holds()) {
          CertificateResult r;
          r.name = "theorem31_conclusions";
          r.note = "hypotheses not satisfied";
          return r;
        }
        return verify_theorem31_conclusions(traj, p, hyp->details.at("x_M"), hyp->details.at("y_M"), o.theorem31);
      });
    } else if (n == "lyapunov") {
      guarded(n, [&] { return verify_lyapunov(traj, p, o.lyapunov_tol); });
    } else if (n == "theorem41") {
      guarded(n, [&] { return monitor_theorem41(traj, p, o.theorem41); });
    } else if (n == "theorem51") {
      guarded(n, [&] { return monitor_theorem51(traj, p, o.theorem51); });
    }
  }
  return out;
}

struct RunResult {
  Trajectory trajectory;
  std::optional<double> diverged_at;
  std::optional<StageReport> stages;
  std::vector<CertificateResult> certificates;
  json summary;

  bool any_violated() const {
    for (const auto& r : certificates)
      if (r.status == CertStatus::Violated) return true;
    return false;
  }

  int exit_code(bool strict) const {
    if (diverged_at) return kExitDivergence;
    if (strict && any_violated()) return kExitViolation;
    return kExitOk;
  }
};

/// Runs the simulation and evaluates everything; performs no I/O.
/// Throws ConfigError if the configuration is invalid.
inline RunResult execute(const RunConfig& c) {
  const auto problems = validate_run_config(c);
  if (!problems.empty()) throw ConfigError("invalid configuration: " + problems.front());
  SystemState initial;
  try {
    initial = generate_initial(c.init, c.model, c.seed);
    check_shape(initial, c.model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  RunResult r;
  try {
    r.trajectory = simulate(c.sim_config(initial));
  } catch (const DivergenceError& e) {
    r.trajectory = e.partial();
    r.diverged_at = e.time();
  }
  const auto& traj = r.trajectory;
  if (traj.size() >= 2) r.stages = detect_stages(traj, c.stages);
  r.certificates = evaluate_certificates(c, initial, traj);

  json& s = r.summary;
  s["version"] = kVersion;
  s["name"] = c.name;
  s["seed"] = c.seed;
  s["status"] = r.diverged_at ? "diverged" : "ok";
  s["diverged_at"] = optional_to_json(r.diverged_at);
  s["samples"] = traj.size();
  s["t_final"] = traj.empty() ? json(nullptr) : json(traj.times.back());
  s["final_frame"] = traj.empty() ? json(nullptr) : frame_to_json(traj.frames.back());
  s["stages"] = r.stages ? stages_to_json(*r.stages) : json(nullptr);
  s["flocking"] = traj.empty() ? json(nullptr) : flocking_to_json(flocking_report(traj, c.model));
  json certs = json::array();
  for (const auto& cr : r.certificates) certs.push_back(certificate_to_json(cr));
  s["certificates"] = certs;
  s["config"] = config_to_json(c);
  return r;
}

inline void write_frames_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto& f = traj.frames[k];
    const double row[] = {traj.times[k], f.m2, f.m2_hat, f.center_sep,
                          f.dx, f.dv, f.dy, f.dw, f.min_inter_dist, f.psi_d_upper, f.psi_s_lower};
    for (std::size_t i = 0; i < std::size(row); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

// One row per particle per sample: t, group (1 or 2), index, position, velocity.
inline void write_states_csv(const std::filesystem::path& path, const Trajectory& traj, const ModelParams& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "t,group,index";
  for (int c = 0; c < p.dim; ++c) out << ",pos" << c;
  for (int c = 0; c < p.dim; ++c) out << ",vel" << c;
  out << "\n";
  auto emit = [&](double t, int group, const std::vector<double>& pos, const std::vector<double>& vel, int n) {
    for (int i = 0; i < n; ++i) {
      out << format_double(t) << "," << group << "," << i;
      for (double v : particle(pos, i, p.dim)) out << "," << format_double(v);
      for (double v : particle(vel, i, p.dim)) out << "," << format_double(v);
      out << "\n";
    }
  };
  for (std::size_t k = 0; k < traj.size(); ++k) {
    emit(traj.times[k], 1, traj.states[k].x, traj.states[k].v, p.n1);
    emit(traj.times[k], 2, traj.states[k].y, traj.states[k].w, p.n2);
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

/// Full run with artifacts in `out_dir`. Returns the process exit code.
inline int run(const RunConfig& c, const std::filesystem::path& out_dir, bool strict, RunResult* result = nullptr) {
  RunResult r = execute(c);
  std::filesystem::create_directories(out_dir);
  write_frames_csv(out_dir / c.csv_path, r.trajectory);
  if (c.dump_states) write_states_csv(out_dir / "states.csv", r.trajectory, c.model);
  write_text(out_dir / c.json_path, r.summary.dump(2) + "\n");
  const int code = r.exit_code(strict);
  if (result) *result = std::move(r);
  return code;
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepRow {
  double value = 0.0;
  int exit_code = kExitOk;
  std::string status;  // ok, diverged or error
  std::string message;
  std::optional<StageReport> stages;
  std::optional<DiagnosticsFrame> final_frame;
  std::vector<CertificateResult> certificates;
};

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline std::string optional_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace detail

inline std::string sweep_csv(const std::string& axis, const std::vector<SweepRow>& rows,
                             const std::vector<std::string>& cert_names) {
  std::string out = detail::csv_quote(axis) +
                    ",status,exit_code,t_velocity_sep,t_spatial_sep,t_flock,m2_final,m2_hat_final,center_sep_final,"
                    "dv_final,dw_final,min_inter_dist_final";
  for (const auto& n : cert_names) out += "," + n + "_status," + n + "_margin";
  out += ",message\n";
  for (const auto& r : rows) {
    out += format_double(r.value) + "," + r.status + "," + std::to_string(r.exit_code);
    if (r.stages) {
      out += "," + detail::optional_cell(r.stages->t_velocity_sep) + "," +
             detail::optional_cell(r.stages->t_spatial_sep) + "," + detail::optional_cell(r.stages->t_flock);
    } else {
      out += ",,,";
    }
    if (r.final_frame) {
      const auto& f = *r.final_frame;
      for (double v : {f.m2, f.m2_hat, f.center_sep, f.dv, f.dw, f.min_inter_dist}) out += "," + format_double(v);
    } else {
      out += ",,,,,,";
    }
    for (const auto& n : cert_names) {
      const CertificateResult* found = nullptr;
      for (const auto& c : r.certificates)
        if (c.name == n) found = &c;
      if (!found) out += ",,";
      else if (found->status == CertStatus::NotApplicable) out += std::string(",") + to_string(found->status) + ",";
      else out += std::string(",") + to_string(found->status) + "," + format_double(found->margin);
    }
    out += "," + detail::csv_quote(r.message) + "\n";
  }
  return out;
}

struct SweepOutcome {
  std::vector<SweepRow> rows;
  std::string aggregate_csv;
  int exit_code = kExitOk;
};

/// Independent runs with `axis` set to each value, rows sorted by value.
/// Writes run_<k>.json per row (k in sorted order) and sweep.csv to `out_dir`
/// when it is non-empty. Output is independent of `parallelism`.
inline SweepOutcome sweep(const RunConfig& base, const std::string& axis, std::vector<double> values,
                          int parallelism, const std::filesystem::path& out_dir, bool strict = false) {
  if (values.empty()) throw ConfigError("sweep: no values");
  {
    RunConfig probe = base;
    apply_setting(probe, axis, format_double(values.front()));
  }
  std::sort(values.begin(), values.end());
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  std::vector<SweepRow> rows(values.size());
  std::vector<std::string> jsons(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < values.size(); k = next++) {
      SweepRow& row = rows[k];
      row.value = values[k];
      RunConfig c = base;
      try {
        apply_setting(c, axis, format_double(values[k]));
        c.name = base.name + "[" + axis + "=" + format_double(values[k]) + "]";
        RunResult r = execute(c);
        row.exit_code = r.exit_code(strict);
        row.status = r.diverged_at ? "diverged" : "ok";
        row.stages = r.stages;
        if (!r.trajectory.empty()) row.final_frame = r.trajectory.frames.back();
        row.certificates = r.certificates;
        jsons[k] = r.summary.dump(2) + "\n";
      } catch (const std::exception& e) {
        row.status = "error";
        row.exit_code = kExitConfig;
        row.message = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(parallelism, static_cast<int>(values.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepOutcome out;
  out.rows = std::move(rows);
  out.aggregate_csv = sweep_csv(axis, out.rows, certificate_result_names(base.certificates));
  for (const auto& r : out.rows) out.exit_code = std::max(out.exit_code, r.exit_code);
  if (!out_dir.empty()) {
    char name[32];
    for (std::size_t k = 0; k < jsons.size(); ++k) {
      if (jsons[k].empty()) continue;
      std::snprintf(name, sizeof name, "run_%03zu.json", k);
      write_text(out_dir / name, jsons[k]);
    }
    write_text(out_dir / "sweep.csv", out.aggregate_csv);
  }
  return out;
}

}  // namespace bicluster::cli
