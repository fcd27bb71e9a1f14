#include "frontlab/error.hpp"
#include "frontlab/front_tracking.hpp"
#include "frontlab/local_estimates.hpp"
#include "frontlab/presets.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace frontlab;

namespace {

// Exact solution of a single discontinuity moving at `speed`.
Evolution moving_step(const State& ul, const State& ur, double speed, double x0 = 0.0) {
  return [=](double t) { return PiecewiseConstantFn::step(x0 + speed * t, ul, ur); };
}

const EstimatedConstants& burgers_constants() {
  static const EstimatedConstants k = estimate_constants(*make_burgers(), 2000, 1);
  return k;
}

const EstimatedConstants& psystem_constants() {
  static const EstimatedConstants k = estimate_constants(*make_psystem(), 2000, 1);
  return k;
}

}  // namespace

TEST(LocalEstimates, PropagationTrivialForConstantState) {
  auto m = make_burgers();
  const State c = scalar_state(0.3);
  const Evolution u = [c](double) { return PiecewiseConstantFn::constant(c); };
  const auto r = entropy_propagation_check(*m, burgers_constants(), u, {-1, 1, 0, 0.5, 1.0}, c);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_TRUE(r.pass);
}

TEST(LocalEstimates, PropagationOfShockMatchesClosedForm) {
  auto m = make_burgers();
  const auto& k = burgers_constants();
  const Evolution u = moving_step(scalar_state(1), scalar_state(0), 0.5);
  const TrapezoidSpec spec{-1.0, 2.0, 0.2, 0.8, k.lambda_hat};
  const auto r = entropy_propagation_check(*m, k, u, spec, scalar_state(1));
  // |u - 1|^2 = 1 to the right of the shock, inside the shrunken interval.
  const double right_end = 2.0 - k.lambda_hat * 0.6;
  EXPECT_NEAR(r.lhs, right_end - 0.4, 1e-14);
  EXPECT_NEAR(r.rhs, 2.0 - 0.1, 1e-14);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.lhs, r.constant * r.rhs);
  EXPECT_THROW(entropy_propagation_check(*m, k, u, {-1, 1, 0, 2, 1.0}, scalar_state(1)),
               PreconditionError);
}

TEST(LocalEstimates, PropagationHoldsOnRandomRuns) {
  CounterRng rng(21);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    for (const ModelPtr& m : {make_burgers(), make_psystem()}) {
      const auto& k = m->dim() == 1 ? burgers_constants() : psystem_constants();
      const Evolution u = front_tracking_evolution(m, preset_random_tv(*m, seed, 0.1), 0.01, 0.5);
      for (int j = 0; j < 5; ++j) {
        const double tau = rng.uniform(0.0, 0.2);
        const double tp = tau + rng.uniform(0.01, 0.3);
        const double a = rng.uniform(-1.0, 0.0);
        const double b = a + 2 * k.lambda_hat * (tp - tau) + rng.uniform(0.05, 1.0);
        State ustar = m->domain().center();
        const auto r = entropy_propagation_check(*m, k, u, {a, b, tau, tp, k.lambda_hat}, ustar);
        EXPECT_TRUE(r.pass) << m->name() << " seed " << seed << " lhs " << r.lhs;
      }
    }
  }
}

TEST(LocalEstimates, LocalL1ConstantFormula) {
  EstimatedConstants k;
  k.c0_hat = 0.5;
  k.Cprime_hat = 1.5;
  k.lambda_hat = 2.0;
  EXPECT_DOUBLE_EQ(local_l1_constant(k), 2.0 * (3.0 * std::sqrt(9.0) + 1.0));
}

TEST(LocalEstimates, LocalL1OnShockIsSpeedTimesJump) {
  auto m = make_burgers();
  const auto& k = burgers_constants();
  const Evolution u = moving_step(scalar_state(1), scalar_state(0), 0.5);
  const auto r = local_l1_check(*m, k, u, 0.1, 0.4, -1.0, 1.0);
  EXPECT_NEAR(r.lhs, 0.5 * 0.3, 1e-14);
  EXPECT_NEAR(r.rhs, 0.3, 1e-14);
  EXPECT_NEAR(r.param("empirical"), 0.5, 1e-13);
  EXPECT_TRUE(r.pass);

  const Evolution flat = [](double) { return PiecewiseConstantFn::constant(scalar_state(0.2)); };
  EXPECT_EQ(local_l1_check(*m, k, flat, 0.0, 0.3, -1, 1).lhs, 0.0);
  EXPECT_THROW(local_l1_check(*m, k, u, 0.0, 5.0, -1, 1), PreconditionError);
  EXPECT_THROW(local_l1_check(*m, k, u, 0.5, 0.4, -1, 1), PreconditionError);
  EXPECT_THROW(r.param("missing"), PreconditionError);
}

TEST(LocalEstimates, LocalL1EmpiricalConstantStableUnderHalving) {
  auto m = make_psystem();
  const auto& k = psystem_constants();
  double worst_long = 0.0, worst_short = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Evolution u = front_tracking_evolution(m, preset_random_tv(*m, seed, 0.1), 0.005, 0.3);
    const auto long_r = local_l1_check(*m, k, u, 0.1, 0.14, -1.0, 1.0);
    const auto short_r = local_l1_check(*m, k, u, 0.1, 0.12, -1.0, 1.0);
    EXPECT_TRUE(long_r.pass);
    EXPECT_TRUE(short_r.pass);
    worst_long = std::max(worst_long, long_r.ratio());
    worst_short = std::max(worst_short, short_r.ratio());
  }
  EXPECT_GT(worst_long, 0.0);
  EXPECT_NEAR(worst_short / worst_long, 1.0, 0.2);
}

TEST(LocalEstimates, LinearEvolveMatchesCharacteristics) {
  Matrix a(2, 2);
  a << 0.0, 1.0, 1.0, 0.0;
  auto m = make_linear(a);
  const PiecewiseConstantFn u0({-0.3, 0.2, 0.5},
                               {pair_state(0, 0), pair_state(0.4, -0.1), pair_state(-0.2, 0.3),
                                pair_state(0, 0)});
  const double t = 0.37;
  const auto ev = linear_evolve(*m, u0, pair_state(0, 0), t);
  // Characteristic variables (u1 - u2)/2 at speed -1 along (1, -1), (u1 + u2)/2 at +1
  // along (1, 1).
  for (double x = -1.0; x <= 1.0; x += 0.0137) {
    const State back = u0.value_at(x + t);
    const State fwd = u0.value_at(x - t);
    const double w1 = 0.5 * (back(0) - back(1));
    const double w2 = 0.5 * (fwd(0) + fwd(1));
    const State expect = pair_state(w1 + w2, -w1 + w2);
    EXPECT_LT((ev.value_at(x) - expect).norm(), 1e-12) << x;
  }
  // Commutes with translation.
  const auto shifted = linear_evolve(*m, u0.translated(0.25), pair_state(0, 0), t);
  EXPECT_LT(l1_distance(shifted, ev.translated(0.25)), 1e-14);
  EXPECT_EQ(linear_evolve(*m, PiecewiseConstantFn::constant(pair_state(0.1, 0.1)),
                          pair_state(0, 0), 1.0),
            PiecewiseConstantFn::constant(pair_state(0.1, 0.1)));
  EXPECT_THROW(linear_evolve(*m, u0, pair_state(0, 0), -0.1), PreconditionError);
}

TEST(LocalEstimates, LinearEvolveBurgersIsTranslation) {
  auto m = make_burgers();
  const PiecewiseConstantFn u0({0.0, 0.5}, {scalar_state(0), scalar_state(0.6), scalar_state(0)});
  const auto ev = linear_evolve(*m, u0, scalar_state(0.3), 0.5);
  EXPECT_LT(l1_distance(ev, u0.translated(0.15)), 1e-15);
}

TEST(LocalEstimates, LinearComparisonVanishesForLinearSolutions) {
  Matrix a(2, 2);
  a << 0.2, 0.5, 0.5, -0.1;
  auto m = make_linear(a);
  const PiecewiseConstantFn u0({-0.1, 0.3}, {pair_state(0, 0), pair_state(0.3, 0.2), pair_state(0, 0)});
  const Evolution u = front_tracking_evolution(m, u0, 0.01, 0.5);
  const auto r = linear_comparison_check(*m, u, 0.1, 0.3, IntervalSpec::open(-1, 1),
                                         pair_state(0, 0), 0.05, 0.05);
  EXPECT_LT(r.lhs, 1e-12);
  EXPECT_TRUE(r.pass);
  EXPECT_THROW(linear_comparison_check(*m, u, 0.1, 0.3, IntervalSpec::open(1, 1),
                                       pair_state(0, 0), 0.05, 0.05),
               PreconditionError);
}

TEST(LocalEstimates, LinearComparisonScalesLikeEpsSquared) {
  auto m = make_psystem();
  const double lam = m->lambda_hat();
  std::vector<double> vs{0.1, 0.05, 0.025};
  std::vector<double> worst;
  for (double v : vs) {
    const auto u0 = preset_random_tv(*m, 4, v, 5);
    const Evolution u = front_tracking_evolution(m, u0, v / 10, 0.11);
    double w = 0.0;
    for (double dt : {1e-1, 1e-2, 1e-3}) {
      const auto r = linear_comparison_check(*m, u, 0.0, dt,
                                             IntervalSpec::open(-2 + lam * dt, 2 - lam * dt),
                                             u0.value_at(0.0), v, v);
      EXPECT_TRUE(r.pass) << "V=" << v << " dt=" << dt << " ratio " << r.ratio();
      w = std::max(w, r.lhs);
    }
    worst.push_back(w);
  }
  const double slope = std::log(worst.front() / worst.back()) / std::log(vs.front() / vs.back());
  EXPECT_GE(slope, 1.8);
}

TEST(LocalEstimates, ErrorIntegrandSelfConsistency) {
  auto m = make_psystem();
  const Evolution u = front_tracking_evolution(m, preset_random_tv(*m, 2, 0.1), 0.01, 1.0);
  for (double h : {0.3, 0.05, 0.001}) EXPECT_LE(error_integrand(m, u, 0.2, h, 0.01), 1e-10);
  EXPECT_THROW(error_integrand(m, u, 0.2, 0.0, 0.01), PreconditionError);
}

TEST(LocalEstimates, ErrorIntegrandOfExactShockVanishes) {
  auto m = make_burgers();
  const Evolution u = moving_step(scalar_state(1), scalar_state(0), 0.5);
  EXPECT_LT(error_integrand(m, u, 0.3, 0.1, 0.05), 1e-13);
}

TEST(LocalEstimates, WrongSpeedShock) {
  auto m = make_burgers();
  const Evolution u = moving_step(scalar_state(1), scalar_state(0), 0.6);
  for (double h : {0.1, 0.01, 0.001}) EXPECT_NEAR(error_integrand(m, u, 0.2, h, 0.05), 0.1, 1e-9);
  const auto r = error_estimate_check(m, u, 1.0, 0.05, 1.0);
  EXPECT_NEAR(r.lhs, 0.1, 0.01);
  EXPECT_NEAR(r.rhs, 0.1, 1e-9);
  EXPECT_TRUE(r.pass);
}

TEST(LocalEstimates, ErrorEstimateOnSemigroupTrajectory) {
  auto m = make_burgers();
  const Evolution u = front_tracking_evolution(m, preset_random_tv(*m, 6, 0.1), 0.02, 0.5);
  ErrorEstimateOptions opt;
  opt.tau_points = 8;
  const auto r = error_estimate_check(m, u, 0.5, 0.02, 1.0, opt);
  EXPECT_LT(r.lhs, 1e-12);
  EXPECT_TRUE(r.pass);
  opt.tau_points = 1;
  EXPECT_THROW(error_estimate_check(m, u, 0.5, 0.02, 1.0, opt), PreconditionError);
}

TEST(LocalEstimates, ReportsCsv) {
  EstimateReport r;
  r.check = "local_l1";
  r.lhs = 0.25;
  r.rhs = 0.5;
  r.constant = 2;
  r.pass = true;
  r.params = {{"tau", 0.1}, {"t", 0.2}};
  std::ostringstream os;
  write_reports_csv(os, {r});
  EXPECT_EQ(os.str(), "check,lhs,rhs,constant,pass,params\nlocal_l1,0.25,0.5,2,true,tau=0.10000000000000001;t=0.20000000000000001\n");
  EXPECT_DOUBLE_EQ(r.ratio(), 0.5);
}
