#include "frontlab/bv.hpp"

#include "frontlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace frontlab {

PiecewiseConstantFn::PiecewiseConstantFn(std::vector<double> breakpoints,
                                         std::vector<State> values) {
  if (values.size() != breakpoints.size() + 1) {
    throw PreconditionError("piecewise-constant function needs one more value than breakpoints");
  }
  const int n = static_cast<int>(values.front().size());
  for (const State& v : values) {
    if (v.size() != n) throw PreconditionError("piecewise-constant values of mixed dimension");
  }
  breakpoints_.reserve(breakpoints.size());
  values_.reserve(values.size());
  values_.push_back(std::move(values[0]));
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    const double x = breakpoints[k];
    if (!std::isfinite(x)) throw PreconditionError("breakpoints must be finite");
    if (!breakpoints_.empty() && x < breakpoints_.back()) {
      throw PreconditionError("breakpoints must be nondecreasing");
    }
    if (!breakpoints_.empty() && x == breakpoints_.back()) {
      values_.back() = std::move(values[k + 1]);
    } else {
      breakpoints_.push_back(x);
      values_.push_back(std::move(values[k + 1]));
    }
  }
}

PiecewiseConstantFn PiecewiseConstantFn::constant(State value) {
  return PiecewiseConstantFn({}, {std::move(value)});
}

PiecewiseConstantFn PiecewiseConstantFn::step(double x, State left, State right) {
  return PiecewiseConstantFn({x}, {std::move(left), std::move(right)});
}

const State& PiecewiseConstantFn::value_at(double x) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

const State& PiecewiseConstantFn::left_limit(double x) const {
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

double PiecewiseConstantFn::total_variation() const {
  double tv = 0.0;
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) tv += jump(k);
  return tv;
}

PiecewiseConstantFn PiecewiseConstantFn::translated(double dx) const {
  std::vector<double> xs(breakpoints_);
  for (double& x : xs) x += dx;
  return PiecewiseConstantFn(std::move(xs), values_);
}

PiecewiseConstantFn PiecewiseConstantFn::simplified() const {
  std::vector<double> xs;
  std::vector<State> vs;
  vs.push_back(values_.front());
  for (std::size_t k = 0; k < breakpoints_.size(); ++k) {
    if (values_[k + 1] == vs.back()) continue;
    xs.push_back(breakpoints_[k]);
    vs.push_back(values_[k + 1]);
  }
  return PiecewiseConstantFn(std::move(xs), std::move(vs));
}

double integrate_pair(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g, double a,
                      double b,
                      const std::function<double(const State&, const State&)>& integrand) {
  if (!(a < b)) return 0.0;
  if (a == -kInf && integrand(f.left_tail(), g.left_tail()) != 0.0) {
    throw PreconditionError("integrand does not vanish on the left tail");
  }
  if (b == kInf && integrand(f.right_tail(), g.right_tail()) != 0.0) {
    throw PreconditionError("integrand does not vanish on the right tail");
  }
  const auto fb = f.breakpoints();
  const auto gb = g.breakpoints();
  std::size_t i = static_cast<std::size_t>(std::upper_bound(fb.begin(), fb.end(), a) - fb.begin());
  std::size_t j = static_cast<std::size_t>(std::upper_bound(gb.begin(), gb.end(), a) - gb.begin());
  double cur = a;
  double total = 0.0;
  while (cur < b) {
    double next = b;
    if (i < fb.size()) next = std::min(next, fb[i]);
    if (j < gb.size()) next = std::min(next, gb[j]);
    if (cur != -kInf && next != kInf && next > cur) {
      total += (next - cur) * integrand(f.values()[i], g.values()[j]);
    }
    if (next == b) break;
    if (i < fb.size() && fb[i] == next) ++i;
    if (j < gb.size() && gb[j] == next) ++j;
    cur = next;
  }
  return total;
}

double integrate(const PiecewiseConstantFn& f, double a, double b,
                 const std::function<double(const State&)>& integrand) {
  if (!(a < b)) return 0.0;
  if (a == -kInf && integrand(f.left_tail()) != 0.0) {
    throw PreconditionError("integrand does not vanish on the left tail");
  }
  if (b == kInf && integrand(f.right_tail()) != 0.0) {
    throw PreconditionError("integrand does not vanish on the right tail");
  }
  const auto fb = f.breakpoints();
  std::size_t i = static_cast<std::size_t>(std::upper_bound(fb.begin(), fb.end(), a) - fb.begin());
  double cur = a;
  double total = 0.0;
  while (cur < b) {
    const double next = i < fb.size() ? std::min(b, fb[i]) : b;
    if (cur != -kInf && next != kInf && next > cur) total += (next - cur) * integrand(f.values()[i]);
    if (next == b) break;
    ++i;
    cur = next;
  }
  return total;
}

double l1_distance(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g) {
  if (f.dim() != g.dim()) throw PreconditionError("l1_distance: dimension mismatch");
  if (!(f.left_tail() == g.left_tail()) || !(f.right_tail() == g.right_tail())) {
    throw PreconditionError("l1_distance: difference is not integrable (tails differ)");
  }
  return l1_distance(f, g, -kInf, kInf);
}

double l1_distance(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g, double a,
                   double b) {
  return integrate_pair(f, g, a, b,
                        [](const State& x, const State& y) { return distance(x, y); });
}

double squared_deviation(const PiecewiseConstantFn& f, const State& ustar, double a, double b) {
  return integrate(f, a, b, [&](const State& x) { return (x - ustar).squaredNorm(); });
}

double total_variation(const PiecewiseConstantFn& f, const IntervalSpec& interval) {
  const auto xs = f.breakpoints();
  double tv = 0.0;
  auto it = std::lower_bound(xs.begin(), xs.end(), interval.a);
  for (; it != xs.end() && *it <= interval.b; ++it) {
    const double x = *it;
    const bool inside = (x > interval.a || (x == interval.a && interval.closed_left)) &&
                        (x < interval.b || (x == interval.b && interval.closed_right));
    if (inside) tv += f.jump(static_cast<std::size_t>(it - xs.begin()));
  }
  return tv;
}

double w_functional(const PiecewiseConstantFn& u_at_t, double t, double xi, double zeta) {
  if (!(xi + t < zeta - t)) return 0.0;
  return total_variation(u_at_t, IntervalSpec::open(xi + t, zeta - t));
}

Partition partition(const PiecewiseConstantFn& u, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("partition: eps must be positive");
  Partition out;
  const auto xs = u.breakpoints();
  double acc = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    acc += u.jump(k);
    if (acc > eps) {
      out.y.push_back(xs[k]);
      acc = 0.0;
    }
  }
  return out;
}

Refinement refine_partition(const PiecewiseConstantFn& u, const std::vector<double>& y,
                            double eps) {
  const double budget = eps * eps;
  const auto xs = u.breakpoints();
  const std::size_t m = y.size();
  Refinement out;
  out.y_prime.resize(m);
  out.y_dprime.resize(m);
  auto index_of = [&](double x) {
    return static_cast<std::ptrdiff_t>(std::lower_bound(xs.begin(), xs.end(), x) - xs.begin());
  };
  for (std::size_t k = 0; k < m; ++k) {
    const double lower = k == 0 ? -kInf : y[k - 1];
    const double upper = k + 1 == m ? kInf : y[k + 1];

    // Walk left from y_k, accepting jumps while the open gap stays within budget.
    {
      double acc = 0.0;
      double inner = y[k];
      std::ptrdiff_t i = index_of(y[k]) - 1;
      double stop = -kInf;
      for (; i >= 0; --i) {
        const double x = xs[static_cast<std::size_t>(i)];
        if (x <= lower || acc + u.jump(static_cast<std::size_t>(i)) > budget) {
          stop = x;
          break;
        }
        acc += u.jump(static_cast<std::size_t>(i));
        inner = x;
      }
      if (stop == -kInf && lower != -kInf) stop = lower;
      out.y_prime[k] = stop == -kInf ? inner - 1.0 : 0.5 * (stop + inner);
    }
    // Walk right symmetrically.
    {
      double acc = 0.0;
      double inner = y[k];
      std::size_t i = static_cast<std::size_t>(index_of(y[k]));
      if (i < xs.size() && xs[i] == y[k]) ++i;
      double stop = kInf;
      for (; i < xs.size(); ++i) {
        const double x = xs[i];
        if (x >= upper || acc + u.jump(i) > budget) {
          stop = x;
          break;
        }
        acc += u.jump(i);
        inner = x;
      }
      if (stop == kInf && upper != kInf) stop = upper;
      out.y_dprime[k] = stop == kInf ? inner + 1.0 : 0.5 * (inner + stop);
    }
  }
  for (std::size_t k = 1; k < m; ++k) {
    out.y_dprime[k - 1] = std::min(out.y_dprime[k - 1], out.y_prime[k]);
  }
  return out;
}

PiecewiseConstantFn project_piecewise(const PiecewiseConstantFn& u, double a, double b,
                                      double t) {
  if (!(t > 0.0) || !(2.0 * t < b - a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw PreconditionError("project_piecewise requires 0 < t < (b - a)/2 on a bounded interval");
  }
  // N with x_N <= b < x_{N+1}
  std::size_t n = static_cast<std::size_t>(std::floor((b - a) / t));
  while (a + static_cast<double>(n + 1) * t <= b) ++n;
  while (n > 0 && a + static_cast<double>(n) * t > b) --n;
  std::vector<double> xs;
  std::vector<State> vs;
  vs.push_back(u.value_at(a + t));
  for (std::size_t k = 2; k + 1 <= n; ++k) {
    const double xk = a + static_cast<double>(k) * t;
    xs.push_back(xk);
    vs.push_back(u.value_at(xk));
  }
  return PiecewiseConstantFn(std::move(xs), std::move(vs)).simplified();
}

namespace {

std::string format_number(double x) {
  if (x == -kInf) return "-inf";
  if (x == kInf) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_number(const std::string& token) {
  std::istringstream is(token);
  if (token == "-inf") return -kInf;
  if (token == "inf") return kInf;
  double x = 0.0;
  is >> x;
  if (!is || !is.eof()) throw ConfigError("not a number: '" + token + "'");
  return x;
}

}  // namespace

void write_text(std::ostream& os, const PiecewiseConstantFn& f) {
  os << "n=" << f.dim() << " pieces=" << f.pieces() << '\n';
  for (std::size_t k = 0; k < f.pieces(); ++k) {
    os << (k == 0 ? std::string("-inf") : format_number(f.breakpoints()[k - 1]));
    for (int i = 0; i < f.dim(); ++i) os << ' ' << format_number(f.values()[k](i));
    os << '\n';
  }
}

PiecewiseConstantFn read_text(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("piecewise-constant text: missing header");
  int n = 0;
  long pieces = 0;
  if (std::sscanf(line.c_str(), "n=%d pieces=%ld", &n, &pieces) != 2 || n < 1 || n > kMaxDim ||
      pieces < 1) {
    throw ConfigError("piecewise-constant text: bad header '" + line + "'");
  }
  std::vector<double> xs;
  std::vector<State> vs;
  for (long k = 0; k < pieces; ++k) {
    if (!std::getline(is, line)) {
      throw ConfigError("piecewise-constant text: expected " + std::to_string(pieces) +
                        " pieces, got " + std::to_string(k));
    }
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> toks;
    while (ls >> tok) toks.push_back(tok);
    if (static_cast<int>(toks.size()) != n + 1) {
      throw ConfigError("piecewise-constant text: line " + std::to_string(k + 2) + " has " +
                        std::to_string(toks.size()) + " fields, expected " +
                        std::to_string(n + 1));
    }
    const double x = parse_number(toks[0]);
    if (k == 0 && x != -kInf) throw ConfigError("piecewise-constant text: first piece must start at -inf");
    if (k > 0) xs.push_back(x);
    State v(n);
    for (int i = 0; i < n; ++i) v(i) = parse_number(toks[static_cast<std::size_t>(i) + 1]);
    vs.push_back(v);
  }
  try {
    return PiecewiseConstantFn(std::move(xs), std::move(vs));
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("piecewise-constant text: ") + e.what());
  }
}

}  // namespace frontlab
