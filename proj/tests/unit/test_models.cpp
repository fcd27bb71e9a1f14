#include "frontlab/error.hpp"
#include "frontlab/model.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace frontlab;

namespace {

// Brute-force relative-entropy constants over a uniform grid of pairs.
struct Brute {
  double c0 = 1e300;
  double cprime = 0.0;
};

Brute brute_constants(const SystemModel& m, int per_axis) {
  const Box& box = m.domain();
  const int n = box.dim();
  std::vector<State> pts;
  if (n == 1) {
    for (int i = 0; i < per_axis; ++i) {
      pts.push_back(scalar_state(box.lo(0) + (box.hi(0) - box.lo(0)) * i / (per_axis - 1)));
    }
  } else {
    for (int i = 0; i < per_axis; ++i) {
      for (int j = 0; j < per_axis; ++j) {
        pts.push_back(pair_state(box.lo(0) + (box.hi(0) - box.lo(0)) * i / (per_axis - 1),
                                 box.lo(1) + (box.hi(1) - box.lo(1)) * j / (per_axis - 1)));
      }
    }
  }
  Brute b;
  for (const State& w : pts) {
    for (const State& u : pts) {
      const double d2 = (w - u).squaredNorm();
      if (d2 == 0.0) continue;
      // Relative entropy written out from its definition.
      const double eta = m.entropy(w) - m.entropy(u) - m.entropy_gradient(u).dot(w - u);
      const double q = m.entropy_flux(w) - m.entropy_flux(u) -
                       m.entropy_gradient(u).dot(m.flux(w) - m.flux(u));
      b.c0 = std::min(b.c0, eta / d2);
      b.cprime = std::max(b.cprime, std::max(eta, std::abs(q)) / d2);
    }
  }
  return b;
}

}  // namespace

TEST(Models, BurgersFluxAndEntropy) {
  auto m = make_burgers();
  EXPECT_DOUBLE_EQ(m->flux(scalar_state(0.6))(0), 0.18);
  EXPECT_DOUBLE_EQ(m->entropy(scalar_state(0.6)), 0.18);
  EXPECT_DOUBLE_EQ(m->entropy_flux(scalar_state(0.6)), 0.072);
  EXPECT_DOUBLE_EQ(m->characteristic_speed(0, scalar_state(-0.3)), -0.3);
  EXPECT_DOUBLE_EQ(m->lambda_hat(), 1.0);
}

TEST(Models, EntropyCompatibilityAllModels) {
  EXPECT_LT(check_entropy_compatibility(*make_burgers(), 500, 1), 1e-6);
  EXPECT_LT(check_entropy_compatibility(*make_psystem(), 500, 2), 1e-6);
  EXPECT_LT(check_entropy_compatibility(*make_psystem(1.4), 500, 3), 1e-6);
  Matrix a(2, 2);
  a << 0.3, 1.0, 1.0, -0.2;
  EXPECT_LT(check_entropy_compatibility(*make_linear(a), 500, 4), 1e-6);
}

TEST(Models, PSystemEigenMatchesClosedForm) {
  auto m = make_psystem();
  const auto& ps = static_cast<const PSystemModel&>(*m);
  for (double v : {0.5, 0.8, 1.3, 2.0}) {
    const State u = pair_state(v, 0.2);
    const EigenData ed = eigen(*m, u);
    const double c = std::sqrt(2.0) * std::pow(v, -1.5);
    EXPECT_NEAR(ed.lambdas(0), -c, 1e-12);
    EXPECT_NEAR(ed.lambdas(1), c, 1e-12);
    EXPECT_NEAR(ps.sound_speed(v), c, 1e-14);
    EXPECT_NEAR(m->characteristic_speed(0, u), -c, 1e-14);
    const Matrix id = ed.left * ed.right;
    EXPECT_NEAR((id - Matrix::Identity(2, 2)).norm(), 0.0, 1e-12);
    // A r_i = lambda_i r_i for the closed-form right vectors.
    for (int i = 0; i < 2; ++i) {
      const State r = m->right_vector(i, u);
      EXPECT_NEAR((m->jacobian(u) * r - m->characteristic_speed(i, u) * r).norm(), 0.0, 1e-12);
    }
  }
}

TEST(Models, SoundSpeedIntegralAgainstQuadrature) {
  for (double gamma : {1.0, 1.4, 2.0, 3.0}) {
    PSystemModel m(gamma, Box{pair_state(0.2, -1), pair_state(3, 1)});
    const double a = 0.6, b = 2.4;
    // Composite Simpson as an independent oracle.
    const int n = 2000;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double x = a + (b - a) * k / n;
      const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
      s += w * std::sqrt(gamma * std::pow(x, -gamma - 1.0));
    }
    s *= (b - a) / (3.0 * n);
    EXPECT_NEAR(m.sound_speed_integral(a, b), s, 1e-10) << "gamma=" << gamma;
    EXPECT_NEAR(m.volume_for_sound_speed(m.sound_speed(1.7)), 1.7, 1e-13);
  }
}

TEST(Models, GenuineNonlinearityOfPSystem) {
  auto m = make_psystem();
  EXPECT_GT(nonlinearity_certificate(*m, 0, 200, 5), 0.0);
  EXPECT_GT(nonlinearity_certificate(*m, 1, 200, 6), 0.0);
  EXPECT_GT(nonlinearity_certificate(*make_burgers(), 0, 200, 7), 0.0);
}

TEST(Models, LinearModelIsLinearlyDegenerate) {
  Matrix a(2, 2);
  a << 0.0, 1.0, 1.0, 0.0;
  auto m = make_linear(a);
  EXPECT_NEAR(nonlinearity_certificate(*m, 0, 50, 1), 0.0, 1e-14);
  EXPECT_EQ(m->field_kind(1), FieldKind::LinearlyDegenerate);
  EXPECT_NEAR(m->characteristic_speed(0, pair_state(0, 0)), -1.0, 1e-14);
}

TEST(Models, EstimatedConstantsAgreeWithBruteForce) {
  for (const ModelPtr& m : {make_burgers(), make_psystem()}) {
    const EstimatedConstants k = estimate_constants(*m, 4000, 11);
    const Brute b = brute_constants(*m, m->dim() == 1 ? 400 : 50);
    EXPECT_NEAR(k.c0_hat, b.c0, 0.1 * b.c0) << m->name();
    EXPECT_NEAR(k.Cprime_hat, b.cprime, 0.1 * b.cprime) << m->name();
    // The analytic convexity constant is a lower bound.
    EXPECT_GE(k.c0_hat, m->c0() * (1 - 1e-9)) << m->name();
    EXPECT_GE(k.lambda_hat, m->lambda_hat());
  }
}

TEST(Models, BurgersRelativeEntropyClosedForm) {
  auto m = make_burgers();
  const RelativeEntropy r = relative_entropy(*m, scalar_state(0.7), scalar_state(-0.2));
  const double d = 0.9;
  EXPECT_NEAR(r.eta, d * d / 2, 1e-15);
  EXPECT_NEAR(r.q, d * d * (2 * 0.7 - 0.2) / 6, 1e-15);
}

TEST(Models, DomainChecks) {
  auto m = make_psystem();
  EXPECT_THROW(m->require_in_domain(pair_state(0.1, 0.0), "test"), DomainError);
  EXPECT_NO_THROW(m->require_in_domain(pair_state(1.0, 0.0), "test"));
  Matrix a(2, 2);
  a << 1.0, 0.0, 0.0, 1.0;
  EXPECT_THROW(eigen(*make_linear(a), pair_state(0, 0)), HyperbolicityError);
  EXPECT_THROW(estimate_constants(*m, 1, 0), PreconditionError);
}
