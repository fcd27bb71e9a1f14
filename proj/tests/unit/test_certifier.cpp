#include "frontlab/certifier.hpp"
#include "frontlab/error.hpp"
#include "frontlab/front_tracking.hpp"
#include "frontlab/presets.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace frontlab;

namespace {

Evolution moving_step(double ul, double ur, double speed) {
  return [=](double t) {
    return PiecewiseConstantFn::step(speed * t, scalar_state(ul), scalar_state(ur));
  };
}

// Line integral of phi along x = s t by composite Simpson, independent of the
// certifier's quadrature.
double along_line(const TestFunction& phi, double s, double t0, double t1) {
  const int n = 4000;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = t0 + (t1 - t0) * k / n;
    const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
    acc += w * phi.value(t, s * t);
  }
  return acc * (t1 - t0) / (3.0 * n);
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("frontlab_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Certifier, BumpClosedForms) {
  EXPECT_EQ(bump(0.0), 1.0);
  EXPECT_EQ(bump(1.0), 0.0);
  EXPECT_EQ(bump(-1.5), 0.0);
  EXPECT_NEAR(bump_integral(1.0), 16.0 / 15.0, 1e-15);
  EXPECT_NEAR(bump_integral(0.0), 8.0 / 15.0, 1e-15);
  EXPECT_EQ(bump_integral(-3.0), 0.0);
  for (double s = -0.99; s < 1.0; s += 0.07) {
    EXPECT_NEAR(bump_derivative(s), (bump(s + 1e-6) - bump(s - 1e-6)) / 2e-6, 1e-8);
  }
  // The W1,inf norm matches a sampled maximum.
  const TestFunction phi{0.5, 0.1, 0.2, 0.3, 2.0};
  double sampled = 0.0;
  for (double t = 0.3; t <= 0.7; t += 0.001) {
    for (double x = -0.2; x <= 0.4; x += 0.001) {
      sampled = std::max({sampled, std::abs(phi.value(t, x)), std::abs(phi.dt(t, x)),
                          std::abs(phi.dx(t, x))});
    }
  }
  EXPECT_NEAR(phi.w1inf_norm(), sampled, 1e-3 * sampled);
  EXPECT_GE(phi.w1inf_norm(), sampled);
}

TEST(Certifier, BumpLatticeStaysInStrip) {
  const auto phis = bump_lattice(0.2, 1.0, -0.5, 0.5, 0.1, 0.25);
  ASSERT_FALSE(phis.empty());
  for (const auto& phi : phis) {
    EXPECT_GE(phi.t0 - phi.sigma_t, 0.2 - 1e-12);
    EXPECT_LE(phi.t0 + phi.sigma_t, 1.0 + 1e-12);
  }
  EXPECT_EQ(phis.size(), 7u * 5u);
  EXPECT_THROW(bump_lattice(0.0, 0.1, 0, 1, 0.1, 0.1), PreconditionError);
}

TEST(Certifier, SolutionContainer) {
  const auto sol = sample_evolution(moving_step(1, 0, 0.5), 0.1, 1.0, 2.0, 2);
  EXPECT_EQ(sol.snapshots.size(), 21u);
  EXPECT_DOUBLE_EQ(sol.horizon(), 1.0);
  EXPECT_NO_THROW(sol.at(0.3 + 1e-13));
  EXPECT_THROW(sol.at(0.33), PreconditionError);
  EXPECT_NO_THROW(sol.validate(*make_burgers()));
  ApproxSolution narrow = sol;
  narrow.support_radius = 0.2;
  EXPECT_THROW(narrow.validate(*make_burgers()), PreconditionError);
  EXPECT_THROW(sample_evolution(moving_step(1, 0, 0.5), 0.0, 1.0, 2.0), PreconditionError);
}

TEST(Certifier, ApproximateLipschitz) {
  const auto flat = sample_evolution(
      [](double) { return PiecewiseConstantFn::constant(scalar_state(0.4)); }, 0.1, 1.0, 1.0);
  EXPECT_EQ(al_check(flat), 0.0);
  const double eps = 0.05;
  const auto shock = sample_evolution(moving_step(1, 0, 0.5), eps, 1.0, 1.0);
  EXPECT_NEAR(al_check(shock), 0.5 * 1.0 / (1.0 + eps), 1e-12);

  ApproxSolution single;
  single.time_step = 0.1;
  single.snapshots.emplace(0.0, PiecewiseConstantFn::constant(scalar_state(0)));
  EXPECT_THROW(al_check(single), PreconditionError);

  auto m = make_psystem();
  const auto ft = front_tracking_scheme(m, preset_random_tv(*m, 3, 0.1), 0.02, 0.5, 3.0);
  EXPECT_LE(al_check(ft), m->lambda_hat() + 1e-9);
}

TEST(Certifier, WeakResidualOfExactAndConstantSolutions) {
  auto m = make_burgers();
  const auto phis = bump_lattice(0.0, 1.0, -0.5, 1.0, 0.25, 0.25);
  const auto flat = sample_evolution(
      [](double) { return PiecewiseConstantFn::constant(scalar_state(0.4)); }, 0.1, 1.0, 1.0);
  for (const auto& phi : phis) {
    EXPECT_LT(weak_bracket(flat, 0.0, 1.0, phi, [](const State& u) { return u; },
                           [&](const State& u) { return m->flux(u); })
                  .norm(),
              1e-15);
  }
  const auto shock = sample_evolution(moving_step(1, 0, 0.5), 0.01, 1.0, 1.0);
  double worst = 0.0;
  for (double r : weak_residual(*m, shock, 0.0, 1.0, phis)) worst = std::max(worst, r);
  EXPECT_LT(worst, 1e-3);
}

TEST(Certifier, FrozenShockFailsWeakForm) {
  auto m = make_burgers();
  const auto frozen = sample_evolution(moving_step(1, 0, 0.0), 0.02, 1.0, 1.0);
  const TestFunction phi{0.5, 0.0, 0.5, 0.5, 1.0};
  const State b = weak_bracket(frozen, 0.0, 1.0, phi, [](const State& u) { return u; },
                               [&](const State& u) { return m->flux(u); });
  // Only the flux term survives: -[f] times the line integral of phi along x = 0.
  EXPECT_NEAR(b(0), 0.5 * along_line(phi, 0.0, 0.0, 1.0), 1e-12);
  const auto res = weak_residual(*m, frozen, 0.0, 1.0, {phi});
  EXPECT_GT(res[0], 1.0);
}

TEST(Certifier, EntropyProductionAlongShocks) {
  auto m = make_burgers();
  for (double sigma : {0.2, 0.1}) {
    const TestFunction phi{0.5, 0.25, sigma, sigma, 1.0};
    const double weight = along_line(phi, 0.5, 0.0, 1.0);
    const auto good = sample_evolution(moving_step(1, 0, 0.5), 0.005, 1.0, 1.0);
    const auto bad = sample_evolution(moving_step(0, 1, 0.5), 0.005, 1.0, 1.0);
    EXPECT_NEAR(entropy_brackets(*m, good, 0.0, 1.0, {phi})[0] / weight, 1.0 / 12.0, 1e-3);
    EXPECT_NEAR(entropy_brackets(*m, bad, 0.0, 1.0, {phi})[0] / weight, -1.0 / 12.0, 1e-3);
  }
  const auto flat = sample_evolution(
      [](double) { return PiecewiseConstantFn::constant(scalar_state(0.4)); }, 0.1, 1.0, 1.0);
  EXPECT_EQ(entropy_residual(*m, flat, 0.0, 1.0, {TestFunction{0.5, 0, 0.3, 0.3, 1}})[0], 0.0);
  EXPECT_THROW(entropy_residual(*m, flat, 0.0, 1.0, {TestFunction{0.5, 0, 0.3, 0.3, -1}}),
               PreconditionError);
  EXPECT_THROW(entropy_residual(*m, flat, 0.0, 1.0, {TestFunction{0.9, 0, 0.3, 0.3, 1}}),
               PreconditionError);
}

TEST(Certifier, CertifyDiscriminatesShocks) {
  auto m = make_burgers();
  const auto phis = bump_lattice(0.0, 1.0, -0.5, 1.0, 0.2, 0.2);
  const auto good = sample_evolution(moving_step(1, 0, 0.5), 0.01, 1.0, 1.0);
  const auto rg = certify(*m, good, 0.0, 1.0, phis, 1.0);
  EXPECT_TRUE(rg.weak_pass);
  EXPECT_TRUE(rg.entropy_pass);
  EXPECT_LT(rg.entropy_certified, 1e-12);
  EXPECT_LE(rg.weak_certified, 10.0 * rg.weak_floor);

  // The normalized entropy deficit of a fixed bad shock grows like 1/eps.
  const auto coarse = certify(*m, sample_evolution(moving_step(0, 1, 0.5), 0.01, 1.0, 1.0), 0.0,
                              1.0, phis, 1.0);
  const auto bad = sample_evolution(moving_step(0, 1, 0.5), 0.001, 1.0, 1.0);
  const auto rb = certify(*m, bad, 0.0, 1.0, phis, 1.0);
  EXPECT_TRUE(rb.weak_pass);
  EXPECT_FALSE(rb.entropy_pass);
  EXPECT_GT(rb.entropy_certified, 2.0);
  EXPECT_NEAR(rb.entropy_certified / coarse.entropy_certified, 10.0, 0.5);
}

TEST(Certifier, SupPropertyUnderLargerTestSets) {
  auto m = make_psystem();
  const auto sol = front_tracking_scheme(m, preset_random_tv(*m, 8, 0.1), 0.02, 0.6, 3.0);
  const auto small = bump_lattice(0.0, 0.6, -0.5, 0.5, 0.1, 0.2);
  auto big = small;
  const auto extra = bump_lattice(0.0, 0.6, -0.5, 0.5, 0.05, 0.1);
  big.insert(big.end(), extra.begin(), extra.end());
  const auto a = certify(*m, sol, 0.0, 0.6, small, 1.0);
  const auto b = certify(*m, sol, 0.0, 0.6, big, 1.0);
  EXPECT_GE(b.weak_certified, a.weak_certified);
  EXPECT_GE(b.entropy_certified, a.entropy_certified);
}

TEST(Certifier, FrontTrackingTrajectoriesAreAdmissible) {
  auto m = make_burgers();
  // Decreasing data: only shocks, so the entropy brackets are nonnegative.
  const PiecewiseConstantFn u0({-0.3, 0.1}, {scalar_state(0.8), scalar_state(0.2), scalar_state(-0.4)});
  const auto sol = front_tracking_scheme(m, u0, 0.01, 1.0, 3.0);
  const auto phis = bump_lattice(0.0, 1.0, -0.6, 0.8, 0.1, 0.1);
  for (double r : entropy_residual(*m, sol, 0.0, 1.0, phis)) EXPECT_GE(r, -1e-9);

  // With rarefaction pieces the entropy defect is of order eps and certifies with C <= 1.
  auto mp = make_psystem();
  const auto solp = front_tracking_scheme(mp, preset_random_tv(*mp, 1, 0.1), 0.01, 0.5, 3.0);
  const auto r = certify(*mp, solp, 0.0, 0.5, bump_lattice(0.0, 0.5, -0.8, 0.8, 0.1, 0.1), 1.0);
  EXPECT_TRUE(r.weak_pass);
  EXPECT_TRUE(r.entropy_pass);
}

TEST(Certifier, ConvergenceRateErrorsAndSelfComparison) {
  auto m = make_burgers();
  const PiecewiseConstantFn u0({0.0, 0.5}, {scalar_state(0), scalar_state(0.8), scalar_state(0)});
  const Scheme ft = [&](double eps) { return front_tracking_scheme(m, u0, eps, 0.5, 3.0); };
  EXPECT_THROW(convergence_rate(m, ft, {0.1, 0.2}, 0.5, 0.001), ConfigError);
  EXPECT_THROW(convergence_rate(m, ft, {0.1, 0.05}, 0.5, 0.05), ConfigError);
  EXPECT_THROW(convergence_rate(m, ft, {}, 0.5, 0.001), ConfigError);

  const auto exact = [&](double eps) {
    return sample_evolution(front_tracking_evolution(m, u0, 1e-3, 0.5), eps, 0.5, 3.0);
  };
  const auto self = convergence_rate(m, exact, {0.1, 0.05}, 0.5, 1e-3);
  for (const auto& row : self.rows) EXPECT_LT(row.distance, 1e-12);

  const auto table = convergence_rate(m, ft, {0.1, 0.05, 0.025, 0.0125}, 0.5, 1e-3);
  ASSERT_EQ(table.rows.size(), 4u);
  EXPECT_TRUE(table.monotone);
  EXPECT_GT(table.slope, 0.7);
  EXPECT_NEAR(table.rows[0].conjecture_ratio,
              table.rows[0].distance / (std::sqrt(0.1) * std::abs(std::log(0.1))), 1e-15);
}

TEST(Certifier, GodunovConservesAndConverges) {
  auto m = make_burgers();
  const PiecewiseConstantFn u0({0.0, 1.0}, {scalar_state(0), scalar_state(1), scalar_state(0)});
  const auto sol = godunov_scheme(m, u0, 0.02, 1.0, 3.0);
  EXPECT_NO_THROW(sol.validate(*m));
  const double mass0 = integrate(u0, -kInf, kInf, [](const State& v) { return v(0); });
  for (const auto& [t, u] : sol.snapshots) {
    EXPECT_NEAR(integrate(u, -3.0, 3.0, [](const State& v) { return v(0); }), mass0, 1e-12) << t;
  }
  const Scheme g = [&](double eps) { return godunov_scheme(m, u0, eps, 1.0, 3.0); };
  const auto table = convergence_rate(m, g, {0.1, 0.05, 0.025, 0.0125}, 1.0, 1e-3);
  EXPECT_TRUE(table.monotone);
  EXPECT_GE(table.slope, 0.4);
  EXPECT_LE(table.slope, 1.1);
  EXPECT_THROW(godunov_scheme(m, u0, 0.1, 1.0, 3.0, 1.5), PreconditionError);
}

TEST(Certifier, ManifestRoundTripAndSnapping) {
  const auto dir = scratch("manifest");
  const auto sol = sample_evolution(moving_step(1, 0, 0.5), 0.1, 0.5, 1.0);
  write_manifest(dir, sol);
  const auto back = read_manifest(dir / "manifest.txt");
  EXPECT_EQ(back.time_step, 0.1);
  EXPECT_EQ(back.support_radius, 1.0);
  ASSERT_EQ(back.snapshots.size(), sol.snapshots.size());
  for (const auto& [t, u] : sol.snapshots) EXPECT_EQ(back.at(t), u);

  {
    std::ofstream f(dir / "jitter.txt");
    f << "# jittered times\neps=0.1 R=1\n0.1003 snap_000001.txt\n0.0 snap_000000.txt\n";
  }
  const auto jit = read_manifest(dir / "jitter.txt");
  EXPECT_NEAR(jit.snap_error, 3e-4, 1e-12);
  EXPECT_EQ(jit.at(0.1), sol.at(0.1));
  {
    std::ofstream f(dir / "clash.txt");
    f << "eps=0.1 R=1\n0.1 snap_000001.txt\n0.11 snap_000002.txt\n";
  }
  EXPECT_THROW(read_manifest(dir / "clash.txt"), ConfigError);
  {
    std::ofstream f(dir / "nohead.txt");
    f << "0.1 snap_000001.txt\n";
  }
  EXPECT_THROW(read_manifest(dir / "nohead.txt"), ConfigError);
  EXPECT_THROW(read_manifest(dir / "absent.txt"), ConfigError);
  std::filesystem::remove_all(dir);
}
