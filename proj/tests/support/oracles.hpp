#pragma once

// Independent reference solutions used only by tests. None of these call the exact
// Riemann solver or the front-tracking code.

#include "frontlab/bv.hpp"
#include "frontlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using frontlab::PiecewiseConstantFn;
using frontlab::State;

/// Cell averages of a local Lax-Friedrichs (Rusanov) run on [lo, hi] with N cells.
struct Grid {
  double lo = 0.0;
  double dx = 0.0;
  std::vector<State> u;

  double center(std::size_t j) const { return lo + (static_cast<double>(j) + 0.5) * dx; }
  const State& at(double x) const {
    const auto j = static_cast<std::size_t>(std::clamp((x - lo) / dx, 0.0, double(u.size() - 1)));
    return u[j];
  }
  PiecewiseConstantFn as_function() const {
    std::vector<double> xs;
    for (std::size_t j = 1; j < u.size(); ++j) xs.push_back(lo + static_cast<double>(j) * dx);
    return PiecewiseConstantFn(xs, u);
  }
};

inline Grid rusanov(const frontlab::SystemModel& m, const std::function<State(double)>& u0,
                    double lo, double hi, std::size_t cells, double T, double cfl = 0.45) {
  Grid g;
  g.lo = lo;
  g.dx = (hi - lo) / static_cast<double>(cells);
  g.u.resize(cells);
  for (std::size_t j = 0; j < cells; ++j) g.u[j] = u0(g.center(j));
  const int n = m.dim();
  auto local_speed = [&](const State& u) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s = std::max(s, std::abs(m.characteristic_speed(i, u)));
    return s;
  };
  std::vector<State> flux(cells + 1);
  std::vector<State> f(cells);
  std::vector<double> speed(cells);
  double t = 0.0;
  while (t < T) {
    double smax = 1e-12;
    for (std::size_t j = 0; j < cells; ++j) {
      f[j] = m.flux(g.u[j]);
      speed[j] = local_speed(g.u[j]);
      smax = std::max(smax, speed[j]);
    }
    const double dt = std::min(cfl * g.dx / smax, T - t);
    for (std::size_t k = 0; k <= cells; ++k) {
      const std::size_t a = k == 0 ? 0 : k - 1;
      const std::size_t b = k == cells ? cells - 1 : k;
      const double s = std::max(speed[a], speed[b]);
      flux[k] = 0.5 * (f[a] + f[b]) - 0.5 * s * (g.u[b] - g.u[a]);
    }
    for (std::size_t j = 0; j < cells; ++j) g.u[j] -= (dt / g.dx) * (flux[j + 1] - flux[j]);
    t += dt;
  }
  return g;
}

/// Burgers with u0 = 1 on [0, 1), 0 elsewhere, by characteristics: a centred
/// rarefaction from x = 0 and a shock from x = 1; the fan catches the shock at t = 2,
/// after which the shock sits at sqrt(2 t).
inline double burgers_box(double t, double x) {
  if (t == 0.0) return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0;
  if (t <= 2.0) {
    const double shock = 1.0 + 0.5 * t;
    if (x < 0.0) return 0.0;
    if (x < t) return x / t;
    if (x < shock) return 1.0;
    return 0.0;
  }
  const double shock = std::sqrt(2.0 * t);
  if (x < 0.0 || x >= shock) return 0.0;
  return x / t;
}

/// Exact L1 distance between a piecewise-constant scalar function and burgers_box at
/// time t: closed form on each piece (linear or constant exact profile).
inline double l1_to_burgers_box(const PiecewiseConstantFn& f, double t) {
  std::vector<double> cuts{-10.0, 10.0};
  for (double x : f.breakpoints()) {
    if (x > -10.0 && x < 10.0) cuts.push_back(x);
  }
  const double shock = t <= 2.0 ? 1.0 + 0.5 * t : std::sqrt(2.0 * t);
  for (double x : {0.0, std::min(t, shock), shock}) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double p = cuts[k], q = cuts[k + 1];
    if (!(q > p)) continue;
    const double c = f.value_at(0.5 * (p + q))(0);
    const double mid = 0.5 * (p + q);
    const bool fan = mid > 0.0 && mid < std::min(t, shock) && t > 0.0;
    if (!fan) {
      total += std::abs(c - burgers_box(t, mid)) * (q - p);
      continue;
    }
    // integral of |c - x/t| over [p, q]
    const double r = c * t;
    auto prim = [&](double a, double b) {  // integral of (x/t - c) over [a, b]
      return (b * b - a * a) / (2.0 * t) - c * (b - a);
    };
    if (r <= p) {
      total += prim(p, q);
    } else if (r >= q) {
      total += -prim(p, q);
    } else {
      total += -prim(p, r) + prim(r, q);
    }
  }
  return total;
}

/// Piecewise-constant sampling of a pointwise profile with `pieces` cells on [lo, hi]
/// (midpoint values), constant tails.
inline PiecewiseConstantFn sample(const std::function<State(double)>& u, double lo, double hi,
                                  std::size_t pieces) {
  std::vector<double> xs;
  std::vector<State> vs{u(lo - 1.0)};
  const double w = (hi - lo) / static_cast<double>(pieces);
  for (std::size_t j = 0; j < pieces; ++j) {
    xs.push_back(lo + static_cast<double>(j) * w);
    vs.push_back(u(lo + (static_cast<double>(j) + 0.5) * w));
  }
  xs.push_back(hi);
  vs.push_back(u(hi + 1.0));
  return PiecewiseConstantFn(xs, vs).simplified();
}

}  // namespace oracle
