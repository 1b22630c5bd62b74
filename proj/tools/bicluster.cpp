// Command-line driver: run a preset or config file, sweep one parameter, or
// list the presets.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bicluster/cli/config.hpp"
#include "bicluster/cli/presets.hpp"
#include "bicluster/cli/runner.hpp"

namespace {

using namespace bicluster::cli;

struct CommonOptions {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::optional<double> dt;
  std::optional<double> t_end;
  bool dump_states = false;
  std::string certificates;
  std::vector<std::string> settings;
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "key = value or JSON config file");
  cmd->add_option("--preset", o.preset_name, "start from a named preset (see `presets`)");
  cmd->add_option("--seed", o.seed, "seed for the initial data");
  cmd->add_option("--out-dir", o.out_dir, "directory for artifacts")->capture_default_str();
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--t-end", o.t_end, "final time");
  cmd->add_flag("--dump-states", o.dump_states, "also write per-particle states.csv");
  cmd->add_option("--certificates", o.certificates, "comma-separated: theorem31,lyapunov,theorem41,theorem51");
  cmd->add_option("--set", o.settings, "override one key, e.g. --set model.kappa_s=4");
  cmd->add_flag("--strict", o.strict, "exit with status 4 if any certificate is violated");
}

// Preset, then config file, then flags.
RunConfig build_config(const CommonOptions& o) {
  RunConfig c = o.preset_name.empty() ? RunConfig{} : preset(o.preset_name);
  if (!o.config_path.empty()) apply_file(c, o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.dt) c.dt = *o.dt;
  if (o.t_end) c.t_end = *o.t_end;
  if (o.dump_states) c.dump_states = true;
  if (!o.certificates.empty()) apply_setting(c, "certificates.enabled", o.certificates);
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  return c;
}

void print_certificates(const std::vector<bicluster::CertificateResult>& certs) {
  for (const auto& r : certs) {
    std::printf("  %-24s %-15s", r.name.c_str(), bicluster::to_string(r.status));
    if (r.status != bicluster::CertStatus::NotApplicable) std::printf(" margin=%.6g", r.margin);
    if (!r.note.empty()) std::printf("  (%s)", r.note.c_str());
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bi-cluster flocking simulator for two Cucker-Smale ensembles"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "simulate one configuration");
  add_common(run_cmd, run_opts);

  CommonOptions sweep_opts;
  std::string axis;
  std::vector<double> values;
  int parallel = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "run one configuration over several values of a key");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axis, "dotted key to vary, e.g. model.kappa_s")->required();
  sweep_cmd->add_option("--values", values, "values for the axis")->required()->delimiter(',');
  sweep_cmd->add_option("--parallel", parallel, "concurrent runs")->capture_default_str();

  std::string show;
  auto* presets_cmd = app.add_subcommand("presets", "list presets or print one as a config file");
  presets_cmd->add_option("--show", show, "print the named preset in key = value form");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (presets_cmd->parsed()) {
      if (!show.empty()) {
        std::cout << to_config_text(preset(show));
      } else {
        for (const auto& n : preset_names()) std::printf("%-30s %s\n", n.c_str(), preset_description(n).c_str());
      }
      return kExitOk;
    }
    if (run_cmd->parsed()) {
      const RunConfig c = build_config(run_opts);
      RunResult r;
      const int code = run(c, run_opts.out_dir, run_opts.strict, &r);
      std::printf("%s: %zu samples, status %s\n", c.name.c_str(), r.trajectory.size(),
                  r.diverged_at ? "diverged" : "ok");
      if (r.diverged_at) std::printf("  diverged at t = %.6g (partial outputs written)\n", *r.diverged_at);
      print_certificates(r.certificates);
      std::printf("artifacts in %s\n", run_opts.out_dir.c_str());
      return code;
    }
    const RunConfig base = build_config(sweep_opts);
    const auto out = sweep(base, axis, values, parallel, sweep_opts.out_dir, sweep_opts.strict);
    std::cout << out.aggregate_csv;
    return out.exit_code;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
