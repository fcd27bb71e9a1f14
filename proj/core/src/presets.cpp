#include "frontlab/presets.hpp"

#include "frontlab/error.hpp"
#include "frontlab/rng.hpp"

#include <algorithm>
#include <cmath>

namespace frontlab {

PiecewiseConstantFn preset_shock(const State& u_l, const State& u_r, double x) {
  return PiecewiseConstantFn::step(x, u_l, u_r);
}

PiecewiseConstantFn preset_rarefaction(const State& u_l, const State& u_r, double x) {
  return PiecewiseConstantFn::step(x, u_l, u_r);
}

PiecewiseConstantFn preset_two_shock(const State& u_l, const State& u_m, const State& u_r,
                                     double x1, double x2) {
  if (!(x1 < x2)) throw PreconditionError("two-shock preset needs x1 < x2");
  return PiecewiseConstantFn({x1, x2}, {u_l, u_m, u_r});
}

PiecewiseConstantFn preset_random_tv(const SystemModel& model, std::uint64_t seed,
                                     double tv_budget, std::size_t jumps, double x_lo,
                                     double x_hi, double margin) {
  if (jumps == 0 || !(tv_budget >= 0.0) || !(x_hi > x_lo)) {
    throw PreconditionError("random TV preset needs jumps > 0, budget >= 0 and x_lo < x_hi");
  }
  const Box& box = model.domain();
  const int n = box.dim();
  Box inner{box.lo + margin * (box.hi - box.lo), box.hi - margin * (box.hi - box.lo)};
  Box central{box.lo + 0.25 * (box.hi - box.lo), box.hi - 0.25 * (box.hi - box.lo)};

  CounterRng rng(seed, 0x7e57);
  std::vector<double> xs(jumps);
  for (double& x : xs) x = rng.uniform(x_lo, x_hi);
  std::sort(xs.begin(), xs.end());

  std::vector<double> weights(jumps);
  double total = 0.0;
  for (double& w : weights) {
    w = 0.2 + rng.uniform();
    total += w;
  }
  std::vector<State> vs{central.sample(rng)};
  for (std::size_t k = 0; k < jumps; ++k) {
    const double size = tv_budget * weights[k] / total;
    State dir(n);
    for (int i = 0; i < n; ++i) dir(i) = rng.uniform(-1.0, 1.0);
    if (dir.norm() == 0.0) dir(0) = 1.0;
    dir.normalize();
    State next = vs.back() + size * dir;
    if (!inner.contains(next, 0.0)) next = vs.back() - size * dir;
    if (!inner.contains(next, 0.0)) {
      throw PreconditionError("random TV preset: budget too large for the domain");
    }
    vs.push_back(next);
  }
  return PiecewiseConstantFn(std::move(xs), std::move(vs));
}

}  // namespace frontlab
