#pragma once

#include "frontlab/bv.hpp"
#include "frontlab/model.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace frontlab {

/// Trapezoid {tau < t < tau', a + slope (t - tau) < x < b - slope (t - tau)}.
struct TrapezoidSpec {
  double a = 0.0;
  double b = 0.0;
  double tau = 0.0;
  double tau_prime = 0.0;
  double slope = 0.0;

  bool valid() const { return tau_prime > tau && 2.0 * slope * (tau_prime - tau) < b - a; }
};

/// One inequality check `lhs <= constant * rhs + tol`.
struct EstimateReport {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> params;

  /// lhs / rhs, or 0 when both vanish.
  double ratio() const;
  double param(const std::string& key) const;
};

constexpr double kEstimateTol = 1e-12;

/// Squared-L2 propagation over a trapezoid with C_hat = Cprime_hat / c0_hat.
EstimateReport entropy_propagation_check(const SystemModel& model, const EstimatedConstants& k,
                                         const Evolution& u, const TrapezoidSpec& spec,
                                         const State& ustar);

/// Constant of the local L1 estimate: lambda_hat (3 sqrt(3 C_hat) + 1). The plain
/// 3 sqrt(3 C_hat) + 1 applies after rescaling time so that lambda_hat = 1.
double local_l1_constant(const EstimatedConstants& k);

/// lhs = integral over ]a + l(t - tau), b - l(t - tau)[ of |u(t) - u(tau)|,
/// rhs = (t - tau) TV(u(tau); ]a, b[), with l = lambda_hat.
EstimateReport local_l1_check(const SystemModel& model, const EstimatedConstants& k,
                              const Evolution& u, double tau, double t, double a, double b);

/// Solution of v_t + A v_x = 0 with A = Df(anchor), started from u_tau.
PiecewiseConstantFn linear_evolve(const SystemModel& model, const PiecewiseConstantFn& u_tau,
                                  const State& anchor, double t_minus_tau);

/// (1/(t - tau)) * integral over the interval of |u(t) - U_flat(t)| against
/// V (V + eps); passes when the ratio is at most k_bound.
EstimateReport linear_comparison_check(const SystemModel& model, const Evolution& u, double tau,
                                       double t, const IntervalSpec& interval,
                                       const State& anchor, double v_tau, double eps,
                                       double k_bound = 50.0);

/// |u(tau + h) - S_h u(tau)|_1 / h with front tracking at resolution delta.
double error_integrand(const ModelPtr& model, const Evolution& u, double tau, double h,
                       double delta);

struct ErrorEstimateOptions {
  std::vector<double> h_factors{1e-1, 1e-2, 1e-3, 1e-4};
  std::size_t tau_points = 64;
  double tol = 1e-9;
};

/// lhs = |u(T) - S_T u(0)|_1, rhs = L_hat * trapezoid over tau of the minimum of
/// error_integrand over h in h_factors * T (restricted to h <= T - tau).
EstimateReport error_estimate_check(const ModelPtr& model, const Evolution& u, double T,
                                    double delta, double l_hat,
                                    const ErrorEstimateOptions& options = {});

/// CSV with header `check,lhs,rhs,constant,pass,params`; params as `k=v;k=v`.
void write_reports_csv(std::ostream& os, const std::vector<EstimateReport>& reports);

}  // namespace frontlab
