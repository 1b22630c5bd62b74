#include <catch_amalgamated.hpp>

#include <cmath>

#include "bicluster/cli/presets.hpp"
#include "support.hpp"

using namespace bicluster;
using Catch::Approx;
using testgen::SplitMix64;

namespace {

std::vector<double> grid(double t_end, int n) {
  std::vector<double> out;
  for (int k = 0; k <= n; ++k) out.push_back(t_end * k / n);
  return out;
}

struct PresetRun {
  cli::RunConfig config;
  SystemState initial;
  Trajectory traj;
};

PresetRun run_preset(const std::string& name) {
  PresetRun r{cli::preset(name), {}, {}};
  r.initial = cli::generate_initial(r.config.init, r.config.model, r.config.seed);
  r.traj = simulate(r.config.sim_config(r.initial));
  return r;
}

const PresetRun& theorem31_run() {
  static const PresetRun r = run_preset("theorem-3-1");
  return r;
}

}  // namespace

TEST_CASE("decay Gronwall bound", "[certificates][gronwall]") {
  const auto ts = grid(5.0, 500);
  const auto zero = SampledFunction::from(ts, [](double) { return 0.0; });
  const auto y = SampledFunction::from(ts, [](double t) { return std::exp(-t); });
  for (double t : {0.0, 1.0, 2.5, 5.0}) CHECK(gronwall_decay_bound(y, 1.0, zero, t) == Approx(std::exp(-t)).epsilon(1e-14));
  CHECK(check_gronwall_decay(y, 1.0, zero).holds());

  // y' = -y + e^{-2t}, y(0) = 0.
  const auto f = SampledFunction::from(ts, [](double t) { return std::exp(-2 * t); });
  const auto yf = SampledFunction::from(ts, [](double t) { return std::exp(-t) - std::exp(-2 * t); });
  CHECK(gronwall_decay_bound(yf, 1.0, f, 2.0) == Approx(std::exp(-2.0) + std::exp(-1.0)).epsilon(1e-12));
  CHECK(gronwall_decay_bound(yf, 1.0, f, 2.0) == Approx(0.503215).epsilon(1e-6));
  CHECK(yf.at(2.0) == Approx(0.117019).epsilon(1e-5));
  CHECK(check_gronwall_decay(yf, 1.0, f).holds());

  // y' = +y is not a decay solution.
  const auto grow = SampledFunction::from(ts, [](double t) { return std::exp(t); });
  const auto bad = check_gronwall_decay(grow, 1.0, zero);
  CHECK(bad.status == CertStatus::Violated);
  CHECK(bad.margin < 0.0);
  REQUIRE(bad.witness_time);
  CHECK(*bad.witness_time == 5.0);

  CHECK_THROWS_AS(gronwall_decay_bound(y, 1.0, zero, 6.0), PreconditionError);
  CHECK_THROWS_AS(gronwall_decay_bound(y, 0.0, zero, 1.0), PreconditionError);
}

TEST_CASE("growth Gronwall lower bound", "[certificates][gronwall]") {
  const auto ts = grid(3.0, 300);
  const auto zero = SampledFunction::from(ts, [](double) { return 0.0; });
  const auto y = SampledFunction::from(ts, [](double t) { return 0.5 * std::exp(1.5 * t); });
  CHECK(gronwall_lower_bound(y, 1.5, zero, 2.0) == Approx(0.5 * std::exp(3.0)).epsilon(1e-14));
  CHECK(check_gronwall_lower(y, 1.5, zero).holds());

  // y' = y - c with y(0) = 2c gives y = c (1 + e^t), attaining the bound.
  const double c = 0.8;
  const auto f = SampledFunction::from(ts, [&](double) { return c; });
  const auto yc = SampledFunction::from(ts, [&](double t) { return c * (1 + std::exp(t)); });
  for (double t : {0.5, 1.0, 3.0}) CHECK(yc.at(t) >= gronwall_lower_bound(yc, 1.0, f, t) - 1e-9);
  CHECK(check_gronwall_lower(yc, 1.0, f, 1e-9).holds());

  // A decaying y cannot satisfy y' >= y.
  const auto decay = SampledFunction::from(ts, [](double t) { return std::exp(-t); });
  CHECK(check_gronwall_lower(decay, 1.0, zero).status == CertStatus::Violated);
}

TEST_CASE("integrable Gronwall bounds", "[certificates][gronwall]") {
  const auto ts = grid(2.0, 2000);
  const auto zero = SampledFunction::from(ts, [](double) { return 0.0; });
  const auto flat = SampledFunction::from(ts, [](double) { return 1.7; });
  CHECK(gronwall_integrable_upper(flat, zero, zero) == 1.7);
  CHECK(gronwall_integrable_lower(flat, zero, zero) == 1.7);
  CHECK(check_gronwall_integrable_upper(flat, zero, zero).holds());
  CHECK(check_gronwall_integrable_lower(flat, zero, zero).holds());

  // y' = alpha y with |alpha|_1 = 1 saturates the upper bound.
  const auto alpha = SampledFunction::from(ts, [](double) { return 0.5; });
  const auto y = SampledFunction::from(ts, [](double t) { return std::exp(0.5 * t); });
  CHECK(gronwall_integrable_upper(y, alpha, zero) == Approx(std::numbers::e).epsilon(1e-12));
  CHECK(check_gronwall_integrable_upper(y, alpha, zero, 1e-9).holds());

  // The L1 norm of 2 kd C0 e^{-(2 + eps0) kd psi t} by trapezoid matches the
  // analytic value.
  const double kd = 0.1, c0 = 1.3, eps0 = 0.5, psi = 1.0, t_end = 10.0;
  const double rate = (2 + eps0) * kd * psi;
  const auto fine = grid(t_end, 10000);
  const auto a = SampledFunction::from(fine, [&](double t) { return 2 * kd * c0 * std::exp(-rate * t); });
  CHECK(a.l1_norm() == Approx(2 * kd * c0 / rate * -std::expm1(-rate * t_end)).epsilon(1e-8));

  // Lower bound: y' = -f with f = 1 loses |f|_1.
  const auto one = SampledFunction::from(ts, [](double) { return 1.0; });
  const auto down = SampledFunction::from(ts, [](double t) { return 3.0 - t; });
  CHECK(gronwall_integrable_lower(down, zero, one) == Approx(1.0).epsilon(1e-12));
  CHECK(check_gronwall_integrable_lower(down, zero, one).holds());

  // Negative controls.
  const auto blowup = SampledFunction::from(ts, [](double t) { return std::exp(3 * t); });
  CHECK(check_gronwall_integrable_upper(blowup, alpha, zero).status == CertStatus::Violated);
  const auto crash = SampledFunction::from(ts, [](double t) { return 3.0 - 2 * t; });
  CHECK(check_gronwall_integrable_lower(crash, zero, one).status == CertStatus::Violated);
  const auto negative = SampledFunction::from(ts, [](double) { return -1.0; });
  CHECK_THROWS_AS(gronwall_integrable_upper(y, negative, zero), PreconditionError);
}

TEST_CASE("bound checkers never pass a sampled violation", "[certificates][gronwall][property]") {
  SplitMix64 g(1717);
  const auto ts = grid(2.0, 200);
  const auto zero = SampledFunction::from(ts, [](double) { return 0.0; });
  for (int trial = 0; trial < 100; ++trial) {
    const double alpha = g.uniform(0.2, 3.0);
    auto y = SampledFunction::from(ts, [&](double t) { return std::exp(-alpha * t); });
    const std::size_t k = 1 + static_cast<std::size_t>(g.next() % (ts.size() - 1));
    y.y[k] += g.uniform(1e-6, 1.0);
    CHECK(check_gronwall_decay(y, alpha, zero).status == CertStatus::Violated);
    auto up = SampledFunction::from(ts, [&](double t) { return std::exp(alpha * t); });
    up.y[k] -= g.uniform(1e-6, 1.0) * up.y[k];
    CHECK(check_gronwall_lower(up, alpha, zero).status == CertStatus::Violated);
  }
}

TEST_CASE("constant-inter-weight hypotheses", "[certificates]") {
  const auto& r = theorem31_run();
  const auto h = check_theorem31_hypotheses(r.initial, r.config.model);
  CHECK(h.status == CertStatus::Holds);
  CHECK(h.margin > 0.0);
  CHECK(h.details.count("x_M") == 1);
  CHECK(h.details.count("y_M") == 1);

  const auto inf = cli::preset("theorem-3-1-infeasible");
  const auto s0 = cli::generate_initial(inf.init, inf.model, inf.seed);
  const auto v = check_theorem31_hypotheses(s0, inf.model);
  CHECK(v.status == CertStatus::Violated);
  CHECK(v.margin < 0.0);
  CHECK((v.details.count("deficit_x") + v.details.count("deficit_y")) >= 1);

  auto friction = r.config.model;
  friction.delta = 0.5;
  CHECK(check_theorem31_hypotheses(r.initial, friction).status == CertStatus::NotApplicable);
  auto decaying = r.config.model;
  decaying.psi_d = WeightSpec::exponential(1.0, 1.0);
  CHECK(check_theorem31_hypotheses(r.initial, decaying).status == CertStatus::NotApplicable);

  // Any velocity spread is admissible for a long-range intra weight.
  auto wide = r.initial;
  for (auto& c : wide.v) c *= 100.0;
  CHECK(check_theorem31_hypotheses(wide, r.config.model).status == CertStatus::Holds);
}

TEST_CASE("constant-inter-weight conclusions", "[certificates]") {
  const auto& r = theorem31_run();
  const auto h = check_theorem31_hypotheses(r.initial, r.config.model);
  const double xm = h.details.at("x_M"), ym = h.details.at("y_M");
  const auto c = verify_theorem31_conclusions(r.traj, r.config.model, xm, ym);
  CHECK(c.status == CertStatus::Holds);
  CHECK(c.margin > 0.0);

  // A radius below the initial diameter cannot bound it.
  const auto wrong = verify_theorem31_conclusions(r.traj, r.config.model, 0.5 * r.traj.frames[0].dx, ym);
  CHECK(wrong.status == CertStatus::Violated);
  REQUIRE(wrong.witness_time);

  // Strong repulsion breaks the velocity envelopes.
  const auto strong = run_preset("theorem-3-1-strong-repulsion");
  const auto hs = check_theorem31_hypotheses(strong.initial, strong.config.model);
  REQUIRE(hs.holds());
  const auto cs = verify_theorem31_conclusions(strong.traj, strong.config.model, hs.details.at("x_M"),
                                               hs.details.at("y_M"));
  CHECK(cs.status == CertStatus::Violated);
}

TEST_CASE("Lyapunov functional", "[certificates]") {
  const auto& r = theorem31_run();
  const auto l = verify_lyapunov(r.traj, r.config.model);
  CHECK(l.status == CertStatus::Holds);

  // A group with no spread stays at zero.
  ModelParams p{3, 2, 2, 1.0, 0.2, 0.0, WeightSpec::power_law(1, 0.4), WeightSpec::constant(1)};
  SystemState s{{0, 0, 1, 0, 0, 1}, {0.1, 0, 0.1, 0, 0.1, 0}, {4, 4, 5, 4}, {-0.1, 0, -0.1, 0}};
  const auto flat = simulate({p, s, 1e-3, 1.0, 10});
  const auto lf = verify_lyapunov(flat, p);
  CHECK(lf.status == CertStatus::Holds);

  const auto strong = run_preset("theorem-3-1-strong-repulsion");
  CHECK(verify_lyapunov(strong.traj, strong.config.model).status == CertStatus::Violated);

  auto friction = r.config.model;
  friction.delta = 1.0;
  CHECK(verify_lyapunov(r.traj, friction).status == CertStatus::NotApplicable);
}

TEST_CASE("decaying-inter-weight monitor", "[certificates]") {
  const auto good = run_preset("theorem-4-1");
  const auto m = monitor_theorem41(good.traj, good.config.model);
  CHECK(m.status == CertStatus::Holds);
  CHECK(m.details.at("eta0") > 0.0);

  const auto constant = run_preset("theorem-4-1-constant-inter");
  CHECK(monitor_theorem41(constant.traj, constant.config.model).status == CertStatus::Violated);

  auto cfg = cli::preset("theorem-4-1");
  cfg.model.kappa_s = 0.0;
  cfg.t_end = 2.0;
  const auto s0 = cli::generate_initial(cfg.init, cfg.model, cfg.seed);
  const auto no_intra = simulate(cfg.sim_config(s0));
  const auto n = monitor_theorem41(no_intra, cfg.model);
  CHECK(n.status == CertStatus::Violated);
  CHECK(n.details.at("eta0") <= 0.0);

  auto friction = good.config.model;
  friction.delta = 0.1;
  CHECK(monitor_theorem41(good.traj, friction).status == CertStatus::NotApplicable);

  // Same trajectory, same constants.
  const auto again = monitor_theorem41(good.traj, good.config.model);
  CHECK(again.details == m.details);
  CHECK(again.margin == m.margin);
}

TEST_CASE("friction monitor", "[certificates]") {
  const auto good = run_preset("theorem-5-1");
  const auto m = monitor_theorem51(good.traj, good.config.model);
  CHECK(m.status == CertStatus::Holds);
  CHECK(m.details.at("eta1") > 0.0);
  CHECK(m.details.at("C8") > 0.0);
  const double c6 = m.details.at("C6");
  for (const auto& f : good.traj.frames) CHECK(std::sqrt(f.m2_hat) <= c6 * (1 + 1e-2));

  const auto none = run_preset("theorem-5-1-no-intra");
  const auto v = monitor_theorem51(none.traj, none.config.model);
  CHECK(v.status == CertStatus::Violated);
  CHECK(v.details.at("eta1") < 0.0);

  auto no_friction = good.config.model;
  no_friction.delta = 0.0;
  CHECK(monitor_theorem51(good.traj, no_friction).status == CertStatus::NotApplicable);

  // Without repulsion, separated flocks keep their distance.
  ModelParams p{3, 3, 2, 5.0, 0.0, 0.5, WeightSpec::constant(1), WeightSpec::exponential(1, 2)};
  SystemState s{{0, 0, 0.1, 0, 0, 0.1}, {1, 0, 1, 0.05, 1, -0.05}, {0, 5, 0.1, 5, 0, 5.1}, {-1, 0, -1, 0.05, -1, -0.05}};
  const auto free = simulate({p, s, 1e-3, 5.0, 10});
  const auto f = monitor_theorem51(free, p);
  CHECK(f.details.at("eta1") > 0.0);
  CHECK(f.status == CertStatus::Holds);

  const auto again = monitor_theorem51(good.traj, good.config.model);
  CHECK(again.details == m.details);
}
