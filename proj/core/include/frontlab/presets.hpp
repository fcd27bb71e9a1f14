#pragma once

#include "frontlab/bv.hpp"
#include "frontlab/model.hpp"

#include <cstdint>

namespace frontlab {

/// u_l on (-inf, x), u_r on [x, inf).
PiecewiseConstantFn preset_shock(const State& u_l, const State& u_r, double x = 0.0);

/// Same shape as preset_shock; the name records intent for data that spread.
PiecewiseConstantFn preset_rarefaction(const State& u_l, const State& u_r, double x = 0.0);

/// u_l | u_m at x1, u_m | u_r at x2.
PiecewiseConstantFn preset_two_shock(const State& u_l, const State& u_m, const State& u_r,
                                     double x1, double x2);

/// `jumps` random jumps in [x_lo, x_hi] whose magnitudes sum to tv_budget, starting
/// from a random state in the central half of the domain. Every value stays in the
/// domain shrunk by `margin` of its width.
PiecewiseConstantFn preset_random_tv(const SystemModel& model, std::uint64_t seed,
                                     double tv_budget, std::size_t jumps = 5,
                                     double x_lo = -0.5, double x_hi = 0.5,
                                     double margin = 0.1);

}  // namespace frontlab
