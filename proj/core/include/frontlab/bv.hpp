#pragma once

#include "frontlab/state.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace frontlab {

/// Interval of the real line with independent closure flags. Endpoints may be +-inf.
struct IntervalSpec {
  double a = -kInf;
  double b = kInf;
  bool closed_left = false;
  bool closed_right = false;

  static IntervalSpec open(double a, double b) { return {a, b, false, false}; }
  /// ]a, b]
  static IntervalSpec open_closed(double a, double b) { return {a, b, false, true}; }
  static IntervalSpec whole_line() { return {}; }

  double length() const { return b - a; }
};

/// Right-continuous piecewise-constant function of x with finitely many jumps.
///
/// `values()[0]` lives on (-inf, x_0), `values()[k]` on [x_{k-1}, x_k), and the last
/// value on [x_{m-1}, +inf). Coincident breakpoints are merged on construction; the
/// value to the right of a merged point is the last one supplied.
class PiecewiseConstantFn {
 public:
  PiecewiseConstantFn() = default;
  PiecewiseConstantFn(std::vector<double> breakpoints, std::vector<State> values);

  static PiecewiseConstantFn constant(State value);
  /// left on (-inf, x), right on [x, +inf).
  static PiecewiseConstantFn step(double x, State left, State right);

  int dim() const { return values_.empty() ? 0 : static_cast<int>(values_.front().size()); }
  std::size_t jumps() const { return breakpoints_.size(); }
  std::size_t pieces() const { return values_.size(); }
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const State> values() const { return values_; }

  const State& left_tail() const { return values_.front(); }
  const State& right_tail() const { return values_.back(); }

  /// u(x) = u(x+).
  const State& value_at(double x) const;
  /// u(x-).
  const State& left_limit(double x) const;

  /// |u(x_k) - u(x_k-)| at breakpoint k.
  double jump(std::size_t k) const { return distance(values_[k + 1], values_[k]); }

  double total_variation() const;
  bool compactly_varying() const { return left_tail() == right_tail(); }

  PiecewiseConstantFn translated(double dx) const;
  /// Drops breakpoints whose two sides carry identical values.
  PiecewiseConstantFn simplified() const;

  bool operator==(const PiecewiseConstantFn& other) const = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<State> values_;
};

/// A solution u(t, .) given as a function of time.
using Evolution = std::function<PiecewiseConstantFn(double)>;

/// Integral over [a, b] of `integrand(f(x), g(x))`, exact for piecewise-constant
/// arguments. Infinite endpoints are allowed when the integrand vanishes on the tails.
double integrate_pair(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g, double a,
                      double b, const std::function<double(const State&, const State&)>& integrand);

/// Integral over [a, b] of `integrand(f(x))`.
double integrate(const PiecewiseConstantFn& f, double a, double b,
                 const std::function<double(const State&)>& integrand);

/// Exact L1 distance over the real line. Throws PreconditionError when the tails differ.
double l1_distance(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g);

/// L1 distance restricted to [a, b].
double l1_distance(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g, double a, double b);

/// Integral of |f - ustar|^2 over [a, b].
double squared_deviation(const PiecewiseConstantFn& f, const State& ustar, double a, double b);

/// Sum of jump magnitudes inside the interval, honoring the closure flags.
double total_variation(const PiecewiseConstantFn& f, const IntervalSpec& interval);

/// Total variation on ]xi + t, zeta - t[, or 0 when that interval is empty.
double w_functional(const PiecewiseConstantFn& u_at_t, double t, double xi, double zeta);

struct Partition {
  /// Finite partition points in increasing order.
  std::vector<double> y;
  std::size_t count() const { return y.size(); }
};

/// Greedy partition: y_{k+1} = sup{x > y_k : TV(]y_k, x[) <= eps}, starting from -inf.
/// The returned points are the finite ones; consecutive open gaps carry variation at
/// most eps and each half-open ]y_{k-1}, y_k] carries more than eps.
Partition partition(const PiecewiseConstantFn& u, double eps);

struct Refinement {
  std::vector<double> y_prime;
  std::vector<double> y_dprime;
};

/// Companion points y'_k < y_k < y''_k with at most eps^2 variation on ]y'_k, y_k[ and
/// ]y_k, y''_k[, and y''_{k-1} <= y'_k.
Refinement refine_partition(const PiecewiseConstantFn& u, const std::vector<double>& y, double eps);

/// Samples u at x_k = a + k t and holds each sample on [x_k, x_{k+1}), k = 1..N-1,
/// where x_N <= b < x_{N+1}. The result is meaningful on [a + t, b - t); outside it
/// the end samples are extended as constants.
PiecewiseConstantFn project_piecewise(const PiecewiseConstantFn& u, double a, double b, double t);

/// Text form: header `n=<dim> pieces=<count>`, then one `x_left v_1 ... v_n` line per
/// piece, the first x_left being -inf.
void write_text(std::ostream& os, const PiecewiseConstantFn& f);
PiecewiseConstantFn read_text(std::istream& is);

}  // namespace frontlab
