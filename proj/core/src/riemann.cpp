#include "frontlab/riemann.hpp"

#include "frontlab/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace frontlab {

namespace {

// Waves with strength below this are round-off, not physics.
constexpr double kNegligible = 1e-13;

bool negligible(const State& a, const State& b) {
  return distance(a, b) <= kNegligible * (1.0 + std::max(a.norm(), b.norm()));
}

Wave make_wave(const SystemModel& model, int family, WaveKind kind, const State& l,
               const State& r) {
  Wave w;
  w.family = family;
  w.kind = kind;
  w.left = l;
  w.right = r;
  if (kind == WaveKind::Rarefaction) {
    w.speed_lo = model.characteristic_speed(family, l);
    w.speed_hi = model.characteristic_speed(family, r);
    if (w.speed_hi < w.speed_lo) std::swap(w.speed_lo, w.speed_hi);
  } else {
    w.speed_lo = w.speed_hi = shock_speed(model, family, l, r);
  }
  return w;
}

std::vector<Wave> burgers_waves(const SystemModel& model, const State& ul, const State& ur) {
  if (ul == ur) return {};
  const WaveKind kind = ul(0) > ur(0) ? WaveKind::Shock : WaveKind::Rarefaction;
  return {make_wave(model, 0, kind, ul, ur)};
}

std::vector<Wave> psystem_waves(const PSystemModel& model, const State& ul, const State& ur) {
  if (ul == ur) return {};
  const double vl = ul(0), wl = ul(1);
  const double vr = ur(0), wr = ur(1);
  const double pl = model.pressure(vl), pr = model.pressure(vr);

  // Velocity reached along the forward 1-curve from u_l and the backward 2-curve
  // from u_r, as functions of the middle specific volume.
  auto forward = [&](double v) {
    return v < vl ? wl - std::sqrt((model.pressure(v) - pl) * (vl - v))
                  : wl + model.sound_speed_integral(vl, v);
  };
  auto backward = [&](double v) {
    return v < vr ? wr + std::sqrt((model.pressure(v) - pr) * (vr - v))
                  : wr - model.sound_speed_integral(vr, v);
  };
  auto gap = [&](double v) { return forward(v) - backward(v); };

  double lo = model.domain().lo(0);
  double hi = model.domain().hi(0);
  if (gap(lo) > 0.0 || gap(hi) < 0.0) {
    throw DomainError("p-system Riemann problem: middle state leaves the domain in v");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (gap(mid) < 0.0 ? lo : hi) = mid;
  }
  if (hi - lo > 1e-12 * std::max(1.0, hi)) {
    throw ConvergenceError("p-system Riemann problem: bisection did not converge");
  }
  const double vm = 0.5 * (lo + hi);
  State um = pair_state(vm, 0.5 * (forward(vm) + backward(vm)));
  model.require_in_domain(um, "p-system Riemann middle state");

  const bool drop1 = negligible(ul, um);
  const bool drop2 = negligible(um, ur);
  auto kind1 = [&](double v) { return v < vl ? WaveKind::Shock : WaveKind::Rarefaction; };
  auto kind2 = [&](double v_left) { return v_left < vr ? WaveKind::Shock : WaveKind::Rarefaction; };
  if (drop1 && drop2) {
    // Data differ by round-off only; keep a single wave carrying the difference.
    if (distance(ul, um) >= distance(um, ur)) return {make_wave(model, 0, kind1(vr), ul, ur)};
    return {make_wave(model, 1, kind2(vl), ul, ur)};
  }
  if (drop1) return {make_wave(model, 1, kind2(vl), ul, ur)};
  if (drop2) return {make_wave(model, 0, kind1(vr), ul, ur)};
  return {make_wave(model, 0, kind1(vm), ul, um), make_wave(model, 1, kind2(vm), um, ur)};
}

std::vector<Wave> linear_waves(const LinearModel& model, const State& ul, const State& ur) {
  if (ul == ur) return {};
  const int n = model.dim();
  Matrix r(n, n);
  for (int i = 0; i < n; ++i) r.col(i) = model.right_vector(i, ul);
  const State alpha = r.inverse() * (ur - ul);
  std::vector<int> families;
  for (int i = 0; i < n; ++i) {
    if (std::abs(alpha(i)) * r.col(i).norm() > kNegligible * (1.0 + ul.norm())) {
      families.push_back(i);
    }
  }
  if (families.empty()) {
    int strongest = 0;
    alpha.cwiseAbs().maxCoeff(&strongest);
    families.push_back(strongest);
  }
  std::vector<Wave> waves;
  State cur = ul;
  for (std::size_t k = 0; k < families.size(); ++k) {
    const int i = families[k];
    State next = k + 1 == families.size() ? ur : State(cur + alpha(i) * r.col(i));
    model.require_in_domain(next, "linear Riemann intermediate state");
    waves.push_back(make_wave(model, i, WaveKind::Contact, cur, next));
    cur = next;
  }
  return waves;
}

}  // namespace

const char* to_string(WaveKind kind) {
  switch (kind) {
    case WaveKind::Shock:
      return "shock";
    case WaveKind::Rarefaction:
      return "rarefaction";
    case WaveKind::Contact:
      return "contact";
  }
  return "?";
}

double shock_speed(const SystemModel& model, int family, const State& u_l, const State& u_r) {
  switch (model.kind()) {
    case ModelKind::Burgers:
      return 0.5 * (u_l(0) + u_r(0));
    case ModelKind::Linear:
      return model.characteristic_speed(family, u_l);
    case ModelKind::PSystem: {
      const auto& ps = static_cast<const PSystemModel&>(model);
      const double dv = u_l(0) - u_r(0);
      if (dv != 0.0) {
        const double s2 = (ps.pressure(u_r(0)) - ps.pressure(u_l(0))) / dv;
        if (s2 > 0.0) return family == 0 ? -std::sqrt(s2) : std::sqrt(s2);
      }
      break;
    }
  }
  // Least-squares Rankine-Hugoniot speed.
  const State du = u_r - u_l;
  const double den = du.squaredNorm();
  if (den == 0.0) return model.characteristic_speed(family, u_l);
  return (model.flux(u_r) - model.flux(u_l)).dot(du) / den;
}

std::vector<Wave> riemann_waves(const SystemModel& model, const State& u_l, const State& u_r) {
  model.require_in_domain(u_l, "Riemann left state");
  model.require_in_domain(u_r, "Riemann right state");
  switch (model.kind()) {
    case ModelKind::Burgers:
      return burgers_waves(model, u_l, u_r);
    case ModelKind::PSystem:
      return psystem_waves(static_cast<const PSystemModel&>(model), u_l, u_r);
    case ModelKind::Linear:
      return linear_waves(static_cast<const LinearModel&>(model), u_l, u_r);
  }
  return {};
}

WaveFan solve_riemann(const ModelPtr& model, const State& u_l, const State& u_r) {
  WaveFan fan;
  fan.model = model;
  fan.left = u_l;
  fan.right = u_r;
  fan.waves = riemann_waves(*model, u_l, u_r);
  return fan;
}

State rarefaction_state(const SystemModel& model, int family, const State& left, double xi) {
  switch (model.kind()) {
    case ModelKind::Burgers:
      return scalar_state(xi);
    case ModelKind::PSystem: {
      const auto& ps = static_cast<const PSystemModel&>(model);
      const double c = family == 0 ? -xi : xi;
      if (!(c > 0.0)) throw DomainError("p-system rarefaction: speed has the wrong sign");
      const double v = ps.volume_for_sound_speed(c);
      const double du = ps.sound_speed_integral(left(0), v);
      return pair_state(v, family == 0 ? left(1) + du : left(1) - du);
    }
    case ModelKind::Linear:
      break;
  }
  throw PreconditionError("rarefaction_state: field is linearly degenerate");
}

State evaluate_fan(const WaveFan& fan, double xi) {
  for (const Wave& w : fan.waves) {
    if (xi < w.speed_lo) return w.left;
    if (w.kind == WaveKind::Rarefaction && xi < w.speed_hi) {
      return rarefaction_state(*fan.model, w.family, w.left, xi);
    }
  }
  return fan.right;
}

double rh_residual(const SystemModel& model, const State& u_l, const State& u_r, double speed) {
  return (model.flux(u_r) - model.flux(u_l) - speed * (u_r - u_l)).norm();
}

double entropy_dissipation(const SystemModel& model, const State& u_l, const State& u_r,
                           double speed) {
  return speed * (model.entropy(u_r) - model.entropy(u_l)) -
         (model.entropy_flux(u_r) - model.entropy_flux(u_l));
}

double riemann_comparison(const ModelPtr& model, const Evolution& u, double tau, double y,
                          double h) {
  if (!(h > 0.0)) throw PreconditionError("riemann_comparison: h must be positive");
  const PiecewiseConstantFn now = u(tau);
  const PiecewiseConstantFn later = u(tau + h);
  const WaveFan fan = solve_riemann(model, now.left_limit(y), now.value_at(y));

  const double a = y - h;
  const double b = y + h;
  std::vector<double> cuts{a, b};
  for (double x : later.breakpoints()) {
    if (x > a && x < b) cuts.push_back(x);
  }
  for (const Wave& w : fan.waves) {
    for (double s : {w.speed_lo, w.speed_hi}) {
      const double x = y + s * h;
      if (x > a && x < b) cuts.push_back(x);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  // 8-point Gauss-Legendre on [-1, 1]
  static constexpr std::array<double, 4> kNodes{0.1834346424956498, 0.5255324099163290,
                                                0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> kWeights{0.3626837833783620, 0.3137066458778873,
                                                  0.2223810344533745, 0.1012285362903763};

  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double p = cuts[k];
    const double q = cuts[k + 1];
    if (!(q > p)) continue;
    const double mid = 0.5 * (p + q);
    const State& value = later.value_at(mid);
    const double xi_mid = (mid - y) / h;
    bool smooth = false;
    for (const Wave& w : fan.waves) {
      if (w.kind == WaveKind::Rarefaction && xi_mid > w.speed_lo && xi_mid < w.speed_hi) {
        smooth = true;
      }
    }
    if (!smooth) {
      total += (q - p) * distance(value, evaluate_fan(fan, xi_mid));
      continue;
    }
    constexpr int kSub = 16;
    const double width = (q - p) / kSub;
    for (int s = 0; s < kSub; ++s) {
      const double c = p + (s + 0.5) * width;
      for (std::size_t g = 0; g < kNodes.size(); ++g) {
        for (double sign : {-1.0, 1.0}) {
          const double x = c + sign * kNodes[g] * 0.5 * width;
          total += 0.5 * width * kWeights[g] * distance(value, evaluate_fan(fan, (x - y) / h));
        }
      }
    }
  }
  return total / h;
}

}  // namespace frontlab
