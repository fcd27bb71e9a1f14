#pragma once

#include "frontlab/bv.hpp"
#include "frontlab/model.hpp"

#include <vector>

namespace frontlab {

enum class WaveKind { Shock, Rarefaction, Contact };

const char* to_string(WaveKind kind);

/// One elementary wave of a Riemann fan. Shocks and contacts have
/// speed_lo == speed_hi; a rarefaction spans [lambda_i(left), lambda_i(right)].
struct Wave {
  int family = 0;
  WaveKind kind = WaveKind::Shock;
  State left;
  State right;
  double speed_lo = 0.0;
  double speed_hi = 0.0;

  double speed() const { return speed_lo; }
  double strength() const { return distance(left, right); }
};

/// Self-similar entropy solution of a Riemann problem, waves ordered by speed.
struct WaveFan {
  ModelPtr model;
  State left;
  State right;
  std::vector<Wave> waves;

  bool empty() const { return waves.empty(); }
};

/// Exact entropy-admissible waves connecting u_l to u_r. Waves whose strength is
/// below round-off are dropped; intermediate states chain exactly from u_l to u_r.
std::vector<Wave> riemann_waves(const SystemModel& model, const State& u_l, const State& u_r);

WaveFan solve_riemann(const ModelPtr& model, const State& u_l, const State& u_r);

/// State of the fan along the ray x/t = xi (right-continuous at shocks).
State evaluate_fan(const WaveFan& fan, double xi);

/// Point of the i-rarefaction curve through `left` where lambda_i equals xi.
State rarefaction_state(const SystemModel& model, int family, const State& left, double xi);

/// Shock speed for an admissible discontinuity of the given family.
double shock_speed(const SystemModel& model, int family, const State& u_l, const State& u_r);

/// |f(u+) - f(u-) - speed (u+ - u-)|.
double rh_residual(const SystemModel& model, const State& u_l, const State& u_r, double speed);

/// speed (eta(u+) - eta(u-)) - (q(u+) - q(u-)); admissible discontinuities give >= 0.
double entropy_dissipation(const SystemModel& model, const State& u_l, const State& u_r,
                           double speed);

/// (1/h) * integral over [y-h, y+h] of |u(tau+h, x) - U#(tau+h, x)|, where U# solves
/// the Riemann problem with the traces u(tau, y-) and u(tau, y+).
double riemann_comparison(const ModelPtr& model, const Evolution& u, double tau, double y,
                          double h);

}  // namespace frontlab
