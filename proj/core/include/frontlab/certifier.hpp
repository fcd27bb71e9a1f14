#pragma once

#include "frontlab/bv.hpp"
#include "frontlab/model.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace frontlab {

/// Time-sampled approximate solution. Snapshots sit on multiples of the time step
/// and, optionally, on finer probe times in between.
struct ApproxSolution {
  double time_step = 0.0;
  double support_radius = 0.0;
  std::map<double, PiecewiseConstantFn> snapshots;
  /// Largest |t - k eps| absorbed when a manifest's times were snapped to the grid.
  double snap_error = 0.0;

  std::vector<double> times() const;
  /// Snapshot at a stored time, matched to within 1e-9 eps.
  const PiecewiseConstantFn& at(double t) const;
  /// Largest stored time.
  double horizon() const;
  /// Throws unless variation lies in [-R, R] and every value is in the domain.
  void validate(const SystemModel& model) const;
};

/// Sample an evolution at k eps for k = 0..T/eps, plus `substeps - 1` probe times
/// inside each step.
ApproxSolution sample_evolution(const Evolution& u, double eps, double T, double radius,
                                std::size_t substeps = 1);

/// phi(t, x) = amplitude * beta((t - t0)/sigma_t) * beta((x - x0)/sigma_x) with
/// beta(s) = (1 - s^2)^2 on [-1, 1].
struct TestFunction {
  double t0 = 0.0;
  double x0 = 0.0;
  double sigma_t = 1.0;
  double sigma_x = 1.0;
  double amplitude = 1.0;

  double value(double t, double x) const;
  double dt(double t, double x) const;
  double dx(double t, double x) const;
  /// max(|phi|, |phi_t|, |phi_x|), in closed form.
  double w1inf_norm() const;
};

double bump(double s);
double bump_derivative(double s);
/// Integral of the bump from -1 to s, clamped to [-1, 1].
double bump_integral(double s);

/// Bumps with t-support inside [tau, tau'] and centers spaced by one scale.
std::vector<TestFunction> bump_lattice(double tau, double tau_prime, double x_lo, double x_hi,
                                       double sigma_t, double sigma_x);

/// Raw bracket of the weak form for one vector-valued density/flux pair:
///   int w(tau) phi(tau) - int w(tau') phi(tau') + int int {w phi_t + F(w) phi_x}.
/// Between snapshots w and F(w) are interpolated linearly in time and the product with
/// phi is integrated exactly, so constant data give a zero bracket up to round-off.
State weak_bracket(const ApproxSolution& sol, double tau, double tau_prime,
                   const TestFunction& phi,
                   const std::function<State(const State&)>& density,
                   const std::function<State(const State&)>& flux, std::size_t stride = 1);

/// sup over snapshot pairs of |u(t) - u(s)|_1 / ((|t - s| + eps) sup TV); the
/// certified M of approximate Lipschitz continuity.
double al_check(const ApproxSolution& sol);

/// Normalized |bracket| / (eps |phi|_{W1,inf} (tau' - tau) sup TV) per test function.
std::vector<double> weak_residual(const SystemModel& model, const ApproxSolution& sol, double tau,
                                  double tau_prime, const std::vector<TestFunction>& phis);

/// Signed entropy bracket per test function, normalized like weak_residual.
std::vector<double> entropy_residual(const SystemModel& model, const ApproxSolution& sol,
                                     double tau, double tau_prime,
                                     const std::vector<TestFunction>& phis);

/// Unnormalized signed entropy brackets.
std::vector<double> entropy_brackets(const SystemModel& model, const ApproxSolution& sol,
                                     double tau, double tau_prime,
                                     const std::vector<TestFunction>& phis);

struct ResidualReport {
  double al_constant = 0.0;
  std::vector<double> weak_residuals;
  std::vector<double> entropy_residuals;
  /// Smallest C for which each condition holds on the sampled test functions.
  double weak_certified = 0.0;
  double entropy_certified = 0.0;
  /// Richardson estimate of the t-quadrature error, normalized the same way.
  double weak_floor = 0.0;
  double entropy_floor = 0.0;
  double threshold = 0.0;
  bool weak_pass = false;
  bool entropy_pass = false;
};

ResidualReport certify(const SystemModel& model, const ApproxSolution& sol, double tau,
                       double tau_prime, const std::vector<TestFunction>& phis,
                       double threshold);

using Scheme = std::function<ApproxSolution(double eps)>;

struct RateRow {
  double eps = 0.0;
  double distance = 0.0;
  /// distance / (sqrt(eps) |ln eps|)
  double conjecture_ratio = 0.0;
};

struct RateTable {
  std::vector<RateRow> rows;
  /// Least-squares slope of log distance against log eps.
  double slope = 0.0;
  /// Value of the fitted linear-in-eps trend at eps = 0.
  double intercept = 0.0;
  bool monotone = false;
};

/// For each eps: sup over the scheme's snapshot times in [0, T] of
/// |u_eps(t) - S_t u_eps(0)|_1, the semigroup approximated at delta_ref.
RateTable convergence_rate(const ModelPtr& model, const Scheme& scheme,
                           const std::vector<double>& eps_grid, double T, double delta_ref,
                           std::size_t max_samples = 64);

/// First-order Godunov scheme with the exact Riemann flux at x/t = 0 on cells of width
/// lambda_hat eps / cfl covering [-R, R], transmissive boundaries.
ApproxSolution godunov_scheme(const ModelPtr& model, const PiecewiseConstantFn& u0, double eps,
                              double T, double radius, double cfl = 0.5);

/// Front tracking at delta = eps sampled on the eps grid.
ApproxSolution front_tracking_scheme(const ModelPtr& model, const PiecewiseConstantFn& u0,
                                     double eps, double T, double radius);

/// Manifest format: `eps=<dt> R=<radius>` then `<time> <file>` lines; `#` comments.
ApproxSolution read_manifest(const std::filesystem::path& manifest);
void write_manifest(const std::filesystem::path& dir, const ApproxSolution& sol,
                    const std::string& stem = "snap");

}  // namespace frontlab
