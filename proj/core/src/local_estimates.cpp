#include "frontlab/local_estimates.hpp"

#include "frontlab/error.hpp"
#include "frontlab/front_tracking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace frontlab {

double EstimateReport::ratio() const {
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : kInf;
  return lhs / rhs;
}

double EstimateReport::param(const std::string& key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return v;
  }
  throw PreconditionError("report has no parameter " + key);
}

EstimateReport entropy_propagation_check(const SystemModel& model, const EstimatedConstants& k,
                                         const Evolution& u, const TrapezoidSpec& spec,
                                         const State& ustar) {
  if (!spec.valid()) {
    throw PreconditionError("trapezoid needs tau < tau' and 2 slope (tau' - tau) < b - a");
  }
  model.require_in_domain(ustar, "reference state u*");
  const double shrink = spec.slope * (spec.tau_prime - spec.tau);
  EstimateReport r;
  r.check = "local_l2";
  r.lhs = squared_deviation(u(spec.tau_prime), ustar, spec.a + shrink, spec.b - shrink);
  r.rhs = squared_deviation(u(spec.tau), ustar, spec.a, spec.b);
  r.constant = k.c_hat();
  r.pass = r.lhs <= r.constant * r.rhs + kEstimateTol;
  r.params = {{"a", spec.a},     {"b", spec.b},         {"tau", spec.tau},
              {"tau_prime", spec.tau_prime}, {"slope", spec.slope}};
  return r;
}

double local_l1_constant(const EstimatedConstants& k) {
  return k.lambda_hat * (3.0 * std::sqrt(3.0 * k.c_hat()) + 1.0);
}

EstimateReport local_l1_check(const SystemModel& /*model*/, const EstimatedConstants& k,
                              const Evolution& u, double tau, double t, double a, double b) {
  if (t < tau) throw PreconditionError("local_l1_check: t < tau");
  const double shrink = k.lambda_hat * (t - tau);
  const double lo = a + shrink;
  const double hi = b - shrink;
  if (!(hi > lo)) throw PreconditionError("local_l1_check: the cone J(t) is empty");
  const PiecewiseConstantFn now = u(tau);
  EstimateReport r;
  r.check = "local_l1";
  r.lhs = l1_distance(u(t), now, lo, hi);
  r.rhs = (t - tau) * total_variation(now, IntervalSpec::open(a, b));
  r.constant = local_l1_constant(k);
  r.pass = r.lhs <= r.constant * r.rhs + kEstimateTol;
  r.params = {{"tau", tau}, {"t", t}, {"a", a}, {"b", b}, {"empirical", r.ratio()}};
  return r;
}

PiecewiseConstantFn linear_evolve(const SystemModel& model, const PiecewiseConstantFn& u_tau,
                                  const State& anchor, double t_minus_tau) {
  if (t_minus_tau < 0.0) throw PreconditionError("linear_evolve: negative time");
  model.require_in_domain(anchor, "linear_evolve anchor");
  const EigenData ed = eigen(model, anchor);
  const int n = model.dim();
  if (t_minus_tau == 0.0 || u_tau.jumps() == 0) return u_tau;

  std::vector<double> xs;
  const auto bp = u_tau.breakpoints();
  xs.reserve(bp.size() * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double shift = ed.lambdas(i) * t_minus_tau;
    for (double x : bp) xs.push_back(x + shift);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto combine = [&](auto&& sample) {
    State v = State::Zero(n);
    for (int i = 0; i < n; ++i) {
      v += ed.left.row(i).dot(sample(i)) * ed.right.col(i);
    }
    return v;
  };
  std::vector<State> vs;
  vs.reserve(xs.size() + 1);
  vs.push_back(combine([&](int) { return u_tau.left_tail(); }));
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double mid = 0.5 * (xs[k] + xs[k + 1]);
    vs.push_back(
        combine([&](int i) { return u_tau.value_at(mid - ed.lambdas(i) * t_minus_tau); }));
  }
  vs.push_back(combine([&](int) { return u_tau.right_tail(); }));
  return PiecewiseConstantFn(std::move(xs), std::move(vs));
}

EstimateReport linear_comparison_check(const SystemModel& model, const Evolution& u, double tau,
                                       double t, const IntervalSpec& interval,
                                       const State& anchor, double v_tau, double eps,
                                       double k_bound) {
  if (!(t > tau)) throw PreconditionError("linear_comparison_check: need t > tau");
  if (!(interval.b > interval.a)) throw PreconditionError("linear_comparison_check: empty J_k(t)");
  const PiecewiseConstantFn flat = linear_evolve(model, u(tau), anchor, t - tau);
  EstimateReport r;
  r.check = "linear_comparison";
  r.lhs = l1_distance(u(t), flat, interval.a, interval.b) / (t - tau);
  r.rhs = v_tau * (v_tau + eps);
  r.constant = k_bound;
  r.pass = r.lhs <= r.constant * r.rhs + kEstimateTol;
  r.params = {{"tau", tau},   {"t", t},          {"a", interval.a}, {"b", interval.b},
              {"V", v_tau},   {"eps", eps},      {"ratio", r.ratio()}};
  return r;
}

double error_integrand(const ModelPtr& model, const Evolution& u, double tau, double h,
                       double delta) {
  if (!(h > 0.0)) throw PreconditionError("error_integrand: h must be positive");
  const PiecewiseConstantFn moved = semigroup(model, u(tau), h, delta);
  return l1_distance(u(tau + h), moved) / h;
}

EstimateReport error_estimate_check(const ModelPtr& model, const Evolution& u, double T,
                                    double delta, double l_hat,
                                    const ErrorEstimateOptions& options) {
  if (!(T > 0.0)) throw PreconditionError("error_estimate_check: T must be positive");
  if (options.tau_points < 2) throw PreconditionError("error_estimate_check: need two tau nodes");
  if (options.h_factors.empty()) throw PreconditionError("error_estimate_check: empty h grid");

  const PiecewiseConstantFn u0 = u(0.0);
  EstimateReport r;
  r.check = "error_estimate";
  r.lhs = l1_distance(u(T), semigroup(model, u0, T, delta));

  const std::size_t m = options.tau_points;
  const double dtau = T / static_cast<double>(m - 1);
  std::vector<double> g(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double tau = j + 1 == m ? T : dtau * static_cast<double>(j);
    double best = kInf;
    for (double factor : options.h_factors) {
      const double h = factor * T;
      if (h > T - tau) continue;
      best = std::min(best, error_integrand(model, u, tau, h, delta));
    }
    // The last node has no forward window; reuse its neighbour.
    g[j] = std::isfinite(best) ? best : (j > 0 ? g[j - 1] : 0.0);
  }
  double integral = 0.0;
  for (std::size_t j = 0; j + 1 < m; ++j) integral += 0.5 * dtau * (g[j] + g[j + 1]);

  r.rhs = integral;
  r.constant = l_hat;
  r.pass = r.lhs <= r.constant * r.rhs + options.tol;
  r.params = {{"T", T}, {"delta", delta}, {"tau_points", static_cast<double>(m)}};
  return r;
}

void write_reports_csv(std::ostream& os, const std::vector<EstimateReport>& reports) {
  os << "check,lhs,rhs,constant,pass,params\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const EstimateReport& r : reports) {
    os << r.check << ',' << num(r.lhs) << ',' << num(r.rhs) << ',' << num(r.constant) << ','
       << (r.pass ? "true" : "false") << ',';
    for (std::size_t k = 0; k < r.params.size(); ++k) {
      if (k) os << ';';
      os << r.params[k].first << '=' << num(r.params[k].second);
    }
    os << '\n';
  }
}

}  // namespace frontlab
