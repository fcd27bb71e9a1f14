#pragma once

#include "frontlab/rng.hpp"
#include "frontlab/state.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>

namespace frontlab {

enum class ModelKind { Burgers, PSystem, Linear };

enum class FieldKind { GenuinelyNonlinear, LinearlyDegenerate };

/// Axis-aligned box of admissible states.
struct Box {
  State lo;
  State hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const State& u, double tol = 1e-12) const;
  State center() const { return 0.5 * (lo + hi); }
  State sample(CounterRng& rng) const;
};

/// Eigen-structure of Df(u). Row i of `left` is l_i, column i of `right` is r_i,
/// normalized so that left * right = I.
struct EigenData {
  State lambdas;
  Matrix left;
  Matrix right;
  std::array<FieldKind, kMaxDim> kinds{};
};

struct RelativeEntropy {
  double eta = 0.0;
  double q = 0.0;
};

/// Sampled constants of the relative-entropy estimates on the model's domain.
struct EstimatedConstants {
  double c0_hat = 0.0;
  double Cprime_hat = 0.0;
  double lambda_hat = 0.0;

  /// Ratio used by the local L2 propagation bound.
  double c_hat() const { return Cprime_hat / c0_hat; }
};

/// A strictly hyperbolic system u_t + f(u)_x = 0 with a strictly convex entropy pair.
///
/// Every evaluation is a pure function of immutable model data, so a model can be
/// shared freely between threads. Gradients and eigen-data are closed form; finite
/// differences only appear in the compatibility cross-check.
class SystemModel {
 public:
  explicit SystemModel(Box omega);
  virtual ~SystemModel() = default;

  virtual ModelKind kind() const = 0;
  virtual std::string name() const = 0;

  int dim() const { return omega_.dim(); }
  const Box& domain() const { return omega_; }

  virtual State flux(const State& u) const = 0;
  virtual Matrix jacobian(const State& u) const = 0;
  virtual double entropy(const State& u) const = 0;
  virtual double entropy_flux(const State& u) const = 0;
  virtual State entropy_gradient(const State& u) const = 0;

  /// lambda_i(u), families sorted by increasing speed.
  virtual double characteristic_speed(int family, const State& u) const = 0;
  virtual State speed_gradient(int family, const State& u) const = 0;
  /// r_i(u), not necessarily normalized.
  virtual State right_vector(int family, const State& u) const = 0;
  virtual FieldKind field_kind(int family) const = 0;

  /// Analytic strict-convexity constant of the entropy on the domain.
  virtual double c0() const = 0;
  /// Supremum of |lambda_i| over the domain.
  virtual double lambda_hat() const = 0;

  /// Throws DomainError when u is outside the domain.
  void require_in_domain(const State& u, const char* what) const;

 private:
  Box omega_;
};

using ModelPtr = std::shared_ptr<const SystemModel>;

/// f = u^2/2, eta = u^2/2, q = u^3/3.
class BurgersModel : public SystemModel {
 public:
  explicit BurgersModel(Box omega);

  ModelKind kind() const override { return ModelKind::Burgers; }
  std::string name() const override { return "burgers"; }
  State flux(const State& u) const override;
  Matrix jacobian(const State& u) const override;
  double entropy(const State& u) const override;
  double entropy_flux(const State& u) const override;
  State entropy_gradient(const State& u) const override;
  double characteristic_speed(int family, const State& u) const override;
  State speed_gradient(int family, const State& u) const override;
  State right_vector(int family, const State& u) const override;
  FieldKind field_kind(int) const override { return FieldKind::GenuinelyNonlinear; }
  double c0() const override { return 0.5; }
  double lambda_hat() const override;
};

/// p-system in Lagrangian coordinates, state (v, u):
///   v_t - u_x = 0,  u_t + p(v)_x = 0,  p(v) = v^(-gamma).
/// Entropy eta = u^2/2 + P(v) with P' = -p, flux q = u p(v).
class PSystemModel : public SystemModel {
 public:
  PSystemModel(double gamma, Box omega);

  ModelKind kind() const override { return ModelKind::PSystem; }
  std::string name() const override { return "p-system"; }
  double gamma() const { return gamma_; }

  double pressure(double v) const;
  double pressure_derivative(double v) const;
  /// Sound speed c(v) = sqrt(-p'(v)).
  double sound_speed(double v) const;
  /// Inverse of the sound speed on v > 0.
  double volume_for_sound_speed(double c) const;
  /// Integral of c(s) ds from a to b.
  double sound_speed_integral(double a, double b) const;

  State flux(const State& u) const override;
  Matrix jacobian(const State& u) const override;
  double entropy(const State& u) const override;
  double entropy_flux(const State& u) const override;
  State entropy_gradient(const State& u) const override;
  double characteristic_speed(int family, const State& u) const override;
  State speed_gradient(int family, const State& u) const override;
  State right_vector(int family, const State& u) const override;
  FieldKind field_kind(int) const override { return FieldKind::GenuinelyNonlinear; }
  double c0() const override;
  double lambda_hat() const override;

 private:
  double gamma_;
};

/// Constant-coefficient u_t + A u_x = 0 with A symmetric, eta = |u|^2/2.
class LinearModel : public SystemModel {
 public:
  LinearModel(Matrix a, Box omega);

  ModelKind kind() const override { return ModelKind::Linear; }
  std::string name() const override { return "linear"; }
  const Matrix& matrix() const { return a_; }

  State flux(const State& u) const override;
  Matrix jacobian(const State& u) const override;
  double entropy(const State& u) const override;
  double entropy_flux(const State& u) const override;
  State entropy_gradient(const State& u) const override;
  double characteristic_speed(int family, const State& u) const override;
  State speed_gradient(int family, const State& u) const override;
  State right_vector(int family, const State& u) const override;
  FieldKind field_kind(int) const override { return FieldKind::LinearlyDegenerate; }
  double c0() const override { return 0.5; }
  double lambda_hat() const override;

 private:
  Matrix a_;
  State lambdas_;
  Matrix vectors_;
};

ModelPtr make_burgers(double lo = -1.0, double hi = 1.0);
ModelPtr make_psystem(double gamma = 2.0, State lo = pair_state(0.5, -1.0),
                      State hi = pair_state(2.0, 1.0));
ModelPtr make_linear(Matrix a, State lo = pair_state(-1.0, -1.0), State hi = pair_state(1.0, 1.0));

/// eta(w|u*) and q(w|u*).
RelativeEntropy relative_entropy(const SystemModel& model, const State& omega, const State& ustar);

/// Sampled c0, C' and a relative-entropy speed bound. The sample set is `samples`
/// random pairs, every pair of a 6-point-per-axis lattice that includes the box
/// corners, and each lattice point paired with a close neighbour along every axis.
/// The returned lambda_hat is the larger of the sampled bound
/// sup |q(w|u*)| / eta(w|u*) and the analytic characteristic-speed bound.
EstimatedConstants estimate_constants(const SystemModel& model, std::size_t samples,
                                      std::uint64_t seed);

/// Numerical eigen-decomposition of Df(u), sorted by eigenvalue.
EigenData eigen(const SystemModel& model, const State& u);

/// max |grad q - grad eta Df| over random states, grad q by central differences.
double check_entropy_compatibility(const SystemModel& model, std::size_t samples,
                                   std::uint64_t seed = 0);

/// min over random states of |grad lambda_i . r_i| / |r_i| for family i.
double nonlinearity_certificate(const SystemModel& model, int family, std::size_t samples,
                                std::uint64_t seed = 0);

}  // namespace frontlab
