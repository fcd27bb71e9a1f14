#include "frontlab/cli/checks.hpp"

#include "frontlab/certifier.hpp"
#include "frontlab/error.hpp"
#include "frontlab/front_tracking.hpp"
#include "frontlab/riemann.hpp"

#include <cmath>
#include <fstream>

namespace frontlab::cli {
namespace {

// Stable per-check stream id (FNV-1a), so adding a check never reshuffles the others.
std::uint64_t stream_of(const std::string& name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double num(const Json& p, const char* key) { return p.at(key).get<double>(); }
std::size_t count(const Json& p, const char* key) {
  const double v = num(p, key);
  if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError(std::string("parameter ") + key + " must be a count");
  return static_cast<std::size_t>(v);
}
std::vector<double> list(const Json& p, const char* key) { return p.at(key).get<std::vector<double>>(); }

State sample_shrunk(const Box& box, double shrink, CounterRng& rng) {
  const State c = box.center();
  State s(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    const double half = 0.5 * shrink * (box.hi(i) - box.lo(i));
    s(i) = rng.uniform(c(i) - half, c(i) + half);
  }
  return s;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(y[k] > 0.0)) continue;
    const double a = std::log(x[k]), b = std::log(y[k]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    ++n;
  }
  if (n < 2) return 0.0;
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

std::string indexed(const std::string& key, std::size_t k) { return key + "[" + std::to_string(k) + "]"; }

std::unique_ptr<FrontTrackingRun> tracked(const RunContext& ctx, double horizon, double delta) {
  TrackingOptions o;
  o.record_history = true;
  auto run = std::make_unique<FrontTrackingRun>(ctx.model, ctx.u0, delta, o);
  run->advance(horizon);
  return run;
}

Evolution shared_evolution(std::shared_ptr<FrontTrackingRun> run) {
  return [run](double t) { return run->snapshot(t); };
}

void account_waves(const SystemModel& m, const std::vector<Wave>& waves, double& rh, double& diss,
                   std::size_t& discontinuities) {
  for (const Wave& w : waves) {
    if (w.kind == WaveKind::Rarefaction) continue;
    ++discontinuities;
    rh = std::max(rh, rh_residual(m, w.left, w.right, w.speed()));
    diss = std::min(diss, entropy_dissipation(m, w.left, w.right, w.speed()));
  }
}

CheckResult check_riemann(const RunContext& ctx, const Json& p) {
  CheckResult r;
  const SystemModel& m = *ctx.model;
  double rh = 0.0, diss = kInf;
  std::size_t disc = 0, waves = 0;
  const auto vals = ctx.u0.values();
  for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
    const auto fan = riemann_waves(m, vals[k], vals[k + 1]);
    waves += fan.size();
    account_waves(m, fan, rh, diss, disc);
  }
  if (disc == 0) diss = 0.0;
  r.metric("jumps", static_cast<double>(ctx.u0.jumps()));
  r.metric("waves", static_cast<double>(waves));
  r.metric("rh_residual", rh);
  r.metric("entropy_dissipation_min", diss);
  r.pass = rh <= num(p, "rh_tol") && diss >= -num(p, "entropy_tol");
  return r;
}

CheckResult check_riemann_fuzz(const RunContext& ctx, const Json& p) {
  CheckResult r;
  const SystemModel& m = *ctx.model;
  CounterRng rng(ctx.seed, stream_of("riemann_fuzz"));
  const std::size_t samples = count(p, "samples");
  const double shrink = num(p, "shrink");
  double rh = 0.0, diss = kInf;
  std::size_t disc = 0, skipped = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const State a = sample_shrunk(m.domain(), shrink, rng);
    const State b = sample_shrunk(m.domain(), shrink, rng);
    try {
      account_waves(m, riemann_waves(m, a, b), rh, diss, disc);
    } catch (const DomainError&) {
      ++skipped;
    }
  }
  if (disc == 0) diss = 0.0;
  r.metric("samples", static_cast<double>(samples));
  r.metric("skipped", static_cast<double>(skipped));
  r.metric("discontinuities", static_cast<double>(disc));
  r.metric("rh_residual", rh);
  r.metric("entropy_dissipation_min", diss);
  r.pass = rh <= num(p, "rh_tol") && diss >= -num(p, "entropy_tol") && skipped < samples;
  return r;
}

CheckResult check_front_tracking(const RunContext& ctx, const Json& p) {
  CheckResult r;
  const Scenario& sc = *ctx.scenario;
  const SystemModel& m = *ctx.model;
  FrontTrackingRun run(ctx.model, ctx.u0, sc.delta);
  // For systems the wave decomposition at t = 0+ may already raise the Euclidean TV,
  // so the bound is taken relative to the fronts' initial total strength.
  const double tv0 = ctx.u0.total_variation();
  const double tv0_plus = run.total_variation();
  run.advance(sc.horizon);
  double tv_max = tv0_plus, prev = tv0_plus;
  bool monotone = true;
  for (const auto& e : run.event_log()) {
    tv_max = std::max(tv_max, e.tv_after);
    if (e.tv_after > prev * (1 + 1e-12) + 1e-14) monotone = false;
    prev = e.tv_after;
  }
  double rh = 0.0, speed = 0.0;
  for (const Front& f : run.fronts()) {
    speed = std::max(speed, std::abs(f.speed));
    if (f.wave.kind != WaveKind::Rarefaction) {
      rh = std::max(rh, rh_residual(m, f.wave.left, f.wave.right, f.speed));
    } else if (f.strength() > sc.delta * (1 + 1e-9)) {
      rh = std::max(rh, kInf);
    }
  }
  const PiecewiseConstantFn end = run.snapshot();
  // Mass balance with the tail fluxes: d/dt int u = f(u_left) - f(u_right).
  const State tail_flux = m.flux(ctx.u0.right_tail()) - m.flux(ctx.u0.left_tail());
  double drift = 0.0;
  for (int i = 0; i < m.dim(); ++i) {
    const double d = integrate_pair(end, ctx.u0, -kInf, kInf,
                                    [i](const State& a, const State& b) { return a(i) - b(i); });
    drift = std::max(drift, std::abs(d + sc.horizon * tail_flux(i)));
  }
  r.metric("events", static_cast<double>(run.event_count()));
  r.metric("fronts", static_cast<double>(run.front_count()));
  r.metric("tv_initial", tv0);
  r.metric("tv_initial_fronts", tv0_plus);
  r.metric("tv_final", end.total_variation());
  r.metric("tv_max", tv_max);
  r.metric("rh_residual", rh);
  r.metric("max_speed", speed);
  r.metric("lambda_hat", m.lambda_hat());
  r.metric("mass_drift", drift);
  const bool tv_ok = m.dim() == 1 ? monotone : tv_max <= num(p, "tv_margin") * tv0_plus + 1e-14;
  r.pass = rh < num(p, "rh_tol") && speed <= m.lambda_hat() * (1 + 1e-12) && tv_ok;
  if (!ctx.out.empty()) {
    std::ofstream f(ctx.out / (ctx.tag + "events.csv"));
    run.write_event_log(f);
  }
  return r;
}

CheckResult check_ft_convergence(const RunContext& ctx, const Json& p) {
  CheckResult r;
  const Scenario& sc = *ctx.scenario;
  const auto deltas = list(p, "deltas");
  if (deltas.size() < 2) throw ConfigError("ft_convergence needs at least two deltas");
  const PiecewiseConstantFn ref = semigroup(ctx.model, ctx.u0, sc.horizon, num(p, "delta_ref"));
  std::vector<double> errors;
  bool decreasing = true;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    errors.push_back(l1_distance(semigroup(ctx.model, ctx.u0, sc.horizon, deltas[k]), ref));
    if (k && !(errors[k] < errors[k - 1])) decreasing = false;
    r.metric(indexed("delta", k), deltas[k]);
    r.metric(indexed("error", k), errors[k]);
  }
  const double slope = loglog_slope(deltas, errors);
  r.metric("slope", slope);
  r.pass = decreasing && slope >= num(p, "min_slope");
  return r;
}

CheckResult check_local_l2(const RunContext& ctx, const Json& p) {
  CheckResult r;
  const Scenario& sc = *ctx.scenario;
  const SystemModel& m = *ctx.model;
  const auto k = estimate_constants(m, count(p, "constant_samples"), 1);
  const Evolution u = shared_evolution(tracked(ctx, sc.horizon, sc.delta));
  CounterRng rng(ctx.seed, stream_of("local_l2"));
  std::size_t failures = 0;
  double worst = 0.0;
  const std::size_t cases = count(p, "trapezoids");
  for (std::size_t j = 0; j < cases; ++j) {
    const double tau = rng.uniform(0.0, 0.5 * sc.horizon);
    const double tp = rng.uniform(tau, sc.horizon);
    const double a = rng.uniform(-1.0, 0.0);
    const double b = a + 2.0 * k.lambda_hat * (tp - tau) + rng.uniform(0.05, 1.0);
    const State ustar = sample_shrunk(m.domain(), num(p, "shrink"), rng);
    if (!(tp > tau)) continue;
    EstimateReport e = entropy_propagation_check(m, k, u, {a, b, tau, tp, k.lambda_hat}, ustar);
    if (!e.pass) ++failures;
    if (e.rhs > 0.0) worst = std::max(worst, e.lhs / (e.constant * e.rhs));
    r.estimates.push_back(std::move(e));
  }
  r.metric("cases", static_cast<double>(r.estimates.size()));
  r.metric("failures", static_cast<double>(failures));
  r.metric("c_hat", k.c_hat());
  r.metric("max_ratio", worst);
  r.pass = failures == 0;
  return r;
}

CheckResult check_local_l1(const RunContext& ctx, const Json& p) {
  CheckResult r;
  const Scenario& sc = *ctx.scenario;
  const SystemModel& m = *ctx.model;
  const auto k = estimate_constants(m, count(p, "constant_samples"), 1);
  const Evolution u = shared_evolution(tracked(ctx, sc.horizon, sc.delta));
  CounterRng rng(ctx.seed, stream_of("local_l1"));
  const double unscaled = 3.0 * std::sqrt(3.0 * k.c_hat()) + 1.0;
  std::size_t failures = 0, unscaled_failures = 0;
  double full = 0.0, half = 0.0;
  const std::size_t cases = count(p, "cases");
  for (std::size_t j = 0; j < cases; ++j) {
    const double a = rng.uniform(-1.0, 0.0);
    const double b = a + rng.uniform(0.5, 2.0);
    const double tau = rng.uniform(0.0, 0.5 * sc.horizon);
    const double reach = std::min(sc.horizon - tau, 0.45 * (b - a) / k.lambda_hat);
    const double t = tau + rng.uniform(0.1, 1.0) * reach;
    for (int halved = 0; halved < 2; ++halved) {
      const double tt = halved ? tau + 0.5 * (t - tau) : t;
      EstimateReport e = local_l1_check(m, k, u, tau, tt, a, b);
      if (!e.pass) ++failures;
      if (e.lhs > unscaled * e.rhs + kEstimateTol) ++unscaled_failures;
      double& worst = halved ? half : full;
      worst = std::max(worst, e.ratio());
      r.estimates.push_back(std::move(e));
    }
  }
  const double drift = full > 0.0 ? std::abs(half / full - 1.0) : 0.0;
  r.metric("cases", static_cast<double>(cases));
  r.metric("failures", static_cast<double>(failures));
  r.metric("failures_unscaled", static_cast<double>(unscaled_failures));
  r.metric("constant", local_l1_constant(k));
  r.metric("constant_unscaled", unscaled);
  r.metric("max_ratio", full);
  r.metric("max_ratio_half", half);
  r.metric("stability", drift);
  r.pass = failures == 0 && drift <= num(p, "stability_tol");
  return r;
}

CheckResult check_linear_comparison(const RunContext& ctx, const Json& p) {
  CheckResult r;
  const Scenario& sc = *ctx.scenario;
  const SystemModel& m = *ctx.model;
  const auto dts = list(p, "dts");
  if (dts.empty()) throw ConfigError("linear_comparison needs dts");
  const double v = num(p, "V") > 0.0 ? num(p, "V") : ctx.u0.total_variation();
  const double eps = num(p, "eps") > 0.0 ? num(p, "eps") : ctx.eps;
  const double delta = num(p, "delta") > 0.0 ? num(p, "delta") : sc.delta;
  const double tau = num(p, "tau"), a = num(p, "a"), b = num(p, "b");
  const double horizon = tau + *std::max_element(dts.begin(), dts.end());
  const Evolution u = shared_evolution(tracked(ctx, horizon, delta));
  const State anchor = u(tau).value_at(0.5 * (a + b));
  const double lam = m.lambda_hat();
  bool ok = true;
  double worst = 0.0;
  for (std::size_t k = 0; k < dts.size(); ++k) {
    const double dt = dts[k];
    EstimateReport e = linear_comparison_check(m, u, tau, tau + dt,
                                               IntervalSpec::open(a + lam * dt, b - lam * dt),
                                               anchor, v, eps, num(p, "K"));
    ok = ok && e.pass;
    worst = std::max(worst, e.ratio());
    r.metric(indexed("ratio", k), e.ratio());
    r.estimates.push_back(std::move(e));
  }
  r.metric("max_ratio", worst);
  r.metric("V", v);
  r.metric("eps", eps);
  r.pass = ok;
  return r;
}

CheckResult check_error_estimate(const RunContext& ctx, const Json& p) {
  CheckResult r;
  const Scenario& sc = *ctx.scenario;
  const double offset = num(p, "speed_offset");
  std::shared_ptr<FrontTrackingRun> run = tracked(ctx, sc.horizon, sc.delta);
  const Evolution u = [run, offset](double t) { return run->snapshot(t).translated(offset * t); };
  double l_hat = num(p, "l_hat");
  if (!(l_hat > 0.0)) {
    l_hat = lipschitz_certificate(ctx.model, ctx.u0, sc.horizon, sc.delta, count(p, "probes"),
                                  ctx.seed);
  }
  ErrorEstimateOptions opt;
  opt.tau_points = count(p, "tau_points");
  EstimateReport e = error_estimate_check(ctx.model, u, sc.horizon, sc.delta, l_hat, opt);
  r.metric("lhs", e.lhs);
  r.metric("rhs", e.rhs);
  r.metric("l_hat", l_hat);
  r.metric("self_integrand", error_integrand(ctx.model, u, 0.5 * sc.horizon, 0.1 * sc.horizon, sc.delta));
  r.pass = e.pass;
  r.estimates.push_back(std::move(e));
  return r;
}

ApproxSolution make_solution(const RunContext& ctx, const std::string& scheme, double eps,
                             std::size_t substeps, const std::string& manifest) {
  const Scenario& sc = *ctx.scenario;
  if (scheme == "front_tracking") {
    return sample_evolution(front_tracking_evolution(ctx.model, ctx.u0, eps, sc.horizon), eps,
                            sc.horizon, sc.support_radius, substeps);
  }
  if (scheme == "godunov") return godunov_scheme(ctx.model, ctx.u0, eps, sc.horizon, sc.support_radius);
  if (scheme == "rh_translate") {
    // A single discontinuity moved at its Rankine-Hugoniot speed, admissible or not.
    if (ctx.model->dim() != 1 || ctx.u0.jumps() != 1) {
      throw ConfigError("scheme rh_translate needs a scalar single-jump datum");
    }
    const State l = ctx.u0.left_tail(), rr = ctx.u0.right_tail();
    const double s = (ctx.model->flux(rr)(0) - ctx.model->flux(l)(0)) / (rr(0) - l(0));
    const PiecewiseConstantFn u0 = ctx.u0;
    return sample_evolution([u0, s](double t) { return u0.translated(s * t); }, eps, sc.horizon,
                            sc.support_radius, substeps);
  }
  if (scheme == "manifest") {
    if (manifest.empty()) throw ConfigError("scheme manifest needs the manifest parameter");
    return read_manifest(manifest);
  }
  throw ConfigError("unknown scheme \"" + scheme + "\"");
}

CheckResult check_certify(const RunContext& ctx, const Json& p) {
  CheckResult r;
  const std::string expect = p.at("expect").get<std::string>();
  if (expect != "admissible" && expect != "inadmissible") {
    throw ConfigError("certify.expect must be admissible or inadmissible");
  }
  const ApproxSolution sol = make_solution(ctx, p.at("scheme").get<std::string>(), ctx.eps,
                                           count(p, "substeps"), p.at("manifest").get<std::string>());
  sol.validate(*ctx.model);
  const double tau = num(p, "tau");
  const double tp = num(p, "tau_prime") > 0.0 ? num(p, "tau_prime") : sol.horizon();
  const auto phis = bump_lattice(tau, tp, num(p, "x_lo"), num(p, "x_hi"), num(p, "sigma_t"),
                                 num(p, "sigma_x"));
  const ResidualReport rep = certify(*ctx.model, sol, tau, tp, phis, num(p, "threshold"));
  r.metric("test_functions", static_cast<double>(phis.size()));
  r.metric("snap_error", sol.snap_error);
  r.metric("al_constant", rep.al_constant);
  r.metric("weak_certified", rep.weak_certified);
  r.metric("weak_floor", rep.weak_floor);
  r.metric("entropy_certified", rep.entropy_certified);
  r.metric("entropy_floor", rep.entropy_floor);
  r.metric("threshold", rep.threshold);
  r.metric("weak_pass", rep.weak_pass);
  r.metric("entropy_pass", rep.entropy_pass);
  const bool admissible = rep.weak_pass && rep.entropy_pass;
  r.pass = expect == "admissible" ? admissible : !admissible;
  return r;
}

CheckResult check_convergence_rate(const RunContext& ctx, const Json& p) {
  CheckResult r;
  const Scenario& sc = *ctx.scenario;
  const std::string scheme = p.at("scheme").get<std::string>();
  if (scheme != "godunov" && scheme != "front_tracking") {
    throw ConfigError("convergence_rate.scheme must be godunov or front_tracking");
  }
  const Scheme gen = [&](double eps) { return make_solution(ctx, scheme, eps, 1, ""); };
  const RateTable t = convergence_rate(ctx.model, gen, list(p, "eps_grid"), sc.horizon,
                                       num(p, "delta_ref"), count(p, "max_samples"));
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    r.metric(indexed("eps", k), t.rows[k].eps);
    r.metric(indexed("distance", k), t.rows[k].distance);
    r.metric(indexed("conjecture_ratio", k), t.rows[k].conjecture_ratio);
  }
  r.metric("slope", t.slope);
  r.metric("intercept", t.intercept);
  r.metric("monotone", t.monotone);
  r.pass = t.monotone && t.intercept <= t.rows.back().distance && t.slope >= num(p, "min_slope");
  return r;
}

}  // namespace

const std::vector<CheckDef>& check_registry() {
  static const std::vector<CheckDef> registry{
      {"riemann", Json{{"rh_tol", 1e-10}, {"entropy_tol", 1e-10}}, check_riemann},
      {"riemann_fuzz",
       Json{{"samples", 1000}, {"shrink", 0.5}, {"rh_tol", 1e-10}, {"entropy_tol", 1e-10}},
       check_riemann_fuzz},
      {"front_tracking", Json{{"rh_tol", 1e-8}, {"tv_margin", 1.1}}, check_front_tracking},
      {"ft_convergence",
       Json{{"deltas", {0.2, 0.1, 0.05, 0.025}}, {"delta_ref", 1e-3}, {"min_slope", 0.8}},
       check_ft_convergence},
      {"local_l2", Json{{"trapezoids", 10}, {"shrink", 0.5}, {"constant_samples", 2000}},
       check_local_l2},
      {"local_l1", Json{{"cases", 10}, {"stability_tol", 0.2}, {"constant_samples", 2000}},
       check_local_l1},
      {"linear_comparison",
       Json{{"dts", {1e-1, 1e-2, 1e-3}},
            {"V", -1.0},
            {"eps", -1.0},
            {"delta", -1.0},
            {"K", 50.0},
            {"tau", 0.0},
            {"a", -2.0},
            {"b", 2.0}},
       check_linear_comparison},
      {"error_estimate",
       Json{{"speed_offset", 0.0}, {"probes", 8}, {"tau_points", 64}, {"l_hat", 0.0}},
       check_error_estimate},
      {"certify",
       Json{{"scheme", "front_tracking"},
            {"manifest", ""},
            {"expect", "admissible"},
            {"threshold", 1.0},
            {"sigma_t", 0.1},
            {"sigma_x", 0.1},
            {"x_lo", -1.0},
            {"x_hi", 1.0},
            {"tau", 0.0},
            {"tau_prime", -1.0},
            {"substeps", 1}},
       check_certify},
      {"convergence_rate",
       Json{{"scheme", "godunov"},
            {"eps_grid", {0.1, 0.05, 0.025, 0.0125}},
            {"delta_ref", 1e-3},
            {"max_samples", 64},
            {"min_slope", 0.0}},
       check_convergence_rate},
  };
  return registry;
}

const CheckDef* find_check(const std::string& name) {
  for (const CheckDef& d : check_registry()) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

}  // namespace frontlab::cli
