#include "frontlab/certifier.hpp"

#include "frontlab/error.hpp"
#include "frontlab/front_tracking.hpp"
#include "frontlab/riemann.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace frontlab {

namespace {

constexpr double kMaxBumpSlope = 1.5396007178390020;  // 8 / (3 sqrt 3)

double time_match_tol(double eps) { return 1e-9 * std::max(eps, 1e-300); }

// Three-point Gauss-Legendre on [p, q]; exact for the degree-5 cell integrands.
template <class F>
double gauss3(double p, double q, F&& f) {
  static constexpr std::array<double, 3> kNodes{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> kWeights{0.5555555555555556, 0.8888888888888888,
                                                  0.5555555555555556};
  const double c = 0.5 * (p + q);
  const double h = 0.5 * (q - p);
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) s += kWeights[i] * f(c + h * kNodes[i]);
  return h * s;
}

// Space moments of one snapshot against x -> beta((x - x0)/sigma_x):
//   density part  int w(u(x)) beta dx,   flux part  int F(u(x)) d/dx beta dx.
struct Moments {
  State w;
  State g;
};

Moments space_moments(const PiecewiseConstantFn& u, const TestFunction& phi,
                      const std::function<State(const State&)>& density,
                      const std::function<State(const State&)>& flux) {
  const double lo = phi.x0 - phi.sigma_x;
  const double hi = phi.x0 + phi.sigma_x;
  const auto xs = u.breakpoints();
  const auto vs = u.values();
  Moments m;
  bool first = true;
  auto add = [&](double p, double q, const State& v) {
    p = std::max(p, lo);
    q = std::min(q, hi);
    if (!(q > p)) return;
    const double sp = (p - phi.x0) / phi.sigma_x;
    const double sq = (q - phi.x0) / phi.sigma_x;
    const State dw = density(v) * (phi.sigma_x * (bump_integral(sq) - bump_integral(sp)));
    const State dg = flux(v) * (bump(sq) - bump(sp));
    if (first) {
      m.w = dw;
      m.g = dg;
      first = false;
    } else {
      m.w += dw;
      m.g += dg;
    }
  };
  // Pieces overlapping [lo, hi].
  std::size_t k = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), lo) - xs.begin());
  double left = lo;
  for (; k < xs.size() && xs[k] < hi; ++k) {
    add(left, xs[k], vs[k]);
    left = xs[k];
  }
  add(left, hi, vs[k]);
  if (first) {
    const State zero_w = density(vs[0]) * 0.0;
    const State zero_g = flux(vs[0]) * 0.0;
    m.w = zero_w;
    m.g = zero_g;
  }
  return m;
}

double sup_tv(const ApproxSolution& sol, double tau, double tau_prime) {
  double tv = 0.0;
  const double tol = time_match_tol(sol.time_step);
  for (auto it = sol.snapshots.lower_bound(tau - tol);
       it != sol.snapshots.end() && it->first <= tau_prime + tol; ++it) {
    tv = std::max(tv, it->second.total_variation());
  }
  return tv;
}

void require_support(const TestFunction& phi, double tau, double tau_prime) {
  const double tol = 1e-12 * std::max(1.0, std::abs(tau_prime));
  if (phi.t0 - phi.sigma_t < tau - tol || phi.t0 + phi.sigma_t > tau_prime + tol) {
    throw PreconditionError("test function t-support leaves the strip [tau, tau']");
  }
  if (!(phi.sigma_t > 0.0) || !(phi.sigma_x > 0.0)) {
    throw PreconditionError("test function scales must be positive");
  }
}

double normalizer(const ApproxSolution& sol, const TestFunction& phi, double tau,
                  double tau_prime, double tv) {
  return sol.time_step * phi.w1inf_norm() * (tau_prime - tau) * tv;
}

// Division with the convention that a TV-free strip certifies with constant 0.
double normalized(double bracket, double denom) { return denom > 0.0 ? bracket / denom : 0.0; }

State identity(const State& u) { return u; }

}  // namespace

std::vector<double> ApproxSolution::times() const {
  std::vector<double> out;
  out.reserve(snapshots.size());
  for (const auto& [t, _] : snapshots) out.push_back(t);
  return out;
}

const PiecewiseConstantFn& ApproxSolution::at(double t) const {
  const double tol = time_match_tol(time_step);
  auto it = snapshots.lower_bound(t - tol);
  if (it == snapshots.end() || it->first > t + tol) {
    throw PreconditionError("approximate solution has no snapshot at the requested time");
  }
  return it->second;
}

double ApproxSolution::horizon() const {
  if (snapshots.empty()) throw PreconditionError("approximate solution has no snapshots");
  return snapshots.rbegin()->first;
}

void ApproxSolution::validate(const SystemModel& model) const {
  if (!(time_step > 0.0)) throw PreconditionError("approximate solution needs eps > 0");
  for (const auto& [t, u] : snapshots) {
    for (const State& v : u.values()) model.require_in_domain(v, "approximate solution value");
    const auto xs = u.breakpoints();
    for (std::size_t k = 0; k < xs.size(); ++k) {
      if (u.jump(k) > 0.0 && std::abs(xs[k]) > support_radius) {
        throw PreconditionError("approximate solution varies outside [-R, R]");
      }
    }
  }
}

ApproxSolution sample_evolution(const Evolution& u, double eps, double T, double radius,
                                std::size_t substeps) {
  if (!(eps > 0.0)) throw PreconditionError("sample_evolution: eps must be positive");
  if (substeps == 0) substeps = 1;
  ApproxSolution sol;
  sol.time_step = eps;
  sol.support_radius = radius;
  const auto steps = static_cast<std::size_t>(std::llround(T / eps));
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * eps;
    sol.snapshots.emplace(t, u(t));
    if (k == steps) break;
    for (std::size_t j = 1; j < substeps; ++j) {
      const double tj = t + static_cast<double>(j) * eps / static_cast<double>(substeps);
      sol.snapshots.emplace(tj, u(tj));
    }
  }
  return sol;
}

double bump(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  return w * w;
}

double bump_derivative(double s) {
  if (s <= -1.0 || s >= 1.0) return 0.0;
  return -4.0 * s * (1.0 - s * s);
}

double bump_integral(double s) {
  if (s <= -1.0) return 0.0;
  if (s >= 1.0) return 16.0 / 15.0;
  const double s2 = s * s;
  return s - 2.0 * s * s2 / 3.0 + s * s2 * s2 / 5.0 + 8.0 / 15.0;
}

double TestFunction::value(double t, double x) const {
  return amplitude * bump((t - t0) / sigma_t) * bump((x - x0) / sigma_x);
}

double TestFunction::dt(double t, double x) const {
  return amplitude * bump_derivative((t - t0) / sigma_t) / sigma_t * bump((x - x0) / sigma_x);
}

double TestFunction::dx(double t, double x) const {
  return amplitude * bump((t - t0) / sigma_t) * bump_derivative((x - x0) / sigma_x) / sigma_x;
}

double TestFunction::w1inf_norm() const {
  const double a = std::abs(amplitude);
  return a * std::max({1.0, kMaxBumpSlope / sigma_t, kMaxBumpSlope / sigma_x});
}

std::vector<TestFunction> bump_lattice(double tau, double tau_prime, double x_lo, double x_hi,
                                       double sigma_t, double sigma_x) {
  if (!(tau_prime - tau >= 2.0 * sigma_t)) {
    throw PreconditionError("bump_lattice: strip thinner than one bump");
  }
  std::vector<TestFunction> out;
  const auto nt = static_cast<std::size_t>(std::floor((tau_prime - tau - 2.0 * sigma_t) / sigma_t + 1e-9));
  const auto nx = static_cast<std::size_t>(std::floor((x_hi - x_lo) / sigma_x + 1e-9));
  for (std::size_t i = 0; i <= nt; ++i) {
    for (std::size_t j = 0; j <= nx; ++j) {
      TestFunction phi;
      phi.t0 = tau + sigma_t * (1.0 + static_cast<double>(i));
      phi.x0 = x_lo + sigma_x * static_cast<double>(j);
      phi.sigma_t = sigma_t;
      phi.sigma_x = sigma_x;
      out.push_back(phi);
    }
  }
  return out;
}

State weak_bracket(const ApproxSolution& sol, double tau, double tau_prime,
                   const TestFunction& phi, const std::function<State(const State&)>& density,
                   const std::function<State(const State&)>& flux, std::size_t stride) {
  if (!(tau_prime > tau)) throw PreconditionError("weak bracket: need tau < tau'");
  require_support(phi, tau, tau_prime);
  if (stride == 0) stride = 1;

  const double tol = time_match_tol(sol.time_step);
  const PiecewiseConstantFn& first = sol.at(tau);
  const PiecewiseConstantFn& last = sol.at(tau_prime);
  std::vector<std::pair<double, const PiecewiseConstantFn*>> nodes;
  {
    std::size_t k = 0;
    for (auto it = sol.snapshots.lower_bound(tau - tol);
         it != sol.snapshots.end() && it->first <= tau_prime + tol; ++it, ++k) {
      if (k % stride == 0) nodes.emplace_back(it->first, &it->second);
    }
    if (nodes.back().second != &last) nodes.emplace_back(tau_prime, &last);
  }

  auto time_profile = [&](double t) { return phi.amplitude * bump((t - phi.t0) / phi.sigma_t); };
  auto time_slope = [&](double t) {
    return phi.amplitude * bump_derivative((t - phi.t0) / phi.sigma_t) / phi.sigma_t;
  };
  const double s_lo = phi.t0 - phi.sigma_t;
  const double s_hi = phi.t0 + phi.sigma_t;

  const Moments m_first = space_moments(first, phi, density, flux);
  State bracket = m_first.w * time_profile(tau) -
                  space_moments(last, phi, density, flux).w * time_profile(tau_prime);

  std::vector<Moments> cache(nodes.size());
  std::vector<bool> have(nodes.size(), false);
  auto moments = [&](std::size_t k) -> const Moments& {
    if (!have[k]) {
      cache[k] = space_moments(*nodes[k].second, phi, density, flux);
      have[k] = true;
    }
    return cache[k];
  };

  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double ta = nodes[k].first;
    const double tb = nodes[k + 1].first;
    const double p = std::max(ta, s_lo);
    const double q = std::min(tb, s_hi);
    if (!(q > p)) continue;
    const double len = tb - ta;
    auto theta = [&](double t) { return (t - ta) / len; };
    const double j0s = gauss3(p, q, [&](double t) { return (1.0 - theta(t)) * time_slope(t); });
    const double j1s = gauss3(p, q, [&](double t) { return theta(t) * time_slope(t); });
    const double j0 = gauss3(p, q, [&](double t) { return (1.0 - theta(t)) * time_profile(t); });
    const double j1 = gauss3(p, q, [&](double t) { return theta(t) * time_profile(t); });
    const Moments& ma = moments(k);
    const Moments& mb = moments(k + 1);
    bracket += ma.w * j0s + mb.w * j1s + ma.g * j0 + mb.g * j1;
  }
  return bracket;
}

double al_check(const ApproxSolution& sol) {
  if (sol.snapshots.size() < 2) throw PreconditionError("al_check: need two snapshots");
  std::vector<double> ts;
  std::vector<const PiecewiseConstantFn*> us;
  std::vector<double> tvs;
  for (const auto& [t, u] : sol.snapshots) {
    ts.push_back(t);
    us.push_back(&u);
    tvs.push_back(u.total_variation());
  }
  double best = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double tv = tvs[i];
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      tv = std::max(tv, tvs[j]);
      if (tv == 0.0) continue;
      const double d = l1_distance(*us[i], *us[j]);
      best = std::max(best, d / ((ts[j] - ts[i] + sol.time_step) * tv));
    }
  }
  return best;
}

std::vector<double> weak_residual(const SystemModel& model, const ApproxSolution& sol, double tau,
                                  double tau_prime, const std::vector<TestFunction>& phis) {
  const double tv = sup_tv(sol, tau, tau_prime);
  auto f = [&model](const State& u) { return model.flux(u); };
  std::vector<double> out;
  out.reserve(phis.size());
  for (const TestFunction& phi : phis) {
    const State b = weak_bracket(sol, tau, tau_prime, phi, identity, f);
    out.push_back(normalized(b.norm(), normalizer(sol, phi, tau, tau_prime, tv)));
  }
  return out;
}

std::vector<double> entropy_brackets(const SystemModel& model, const ApproxSolution& sol,
                                     double tau, double tau_prime,
                                     const std::vector<TestFunction>& phis) {
  auto eta = [&model](const State& u) { return scalar_state(model.entropy(u)); };
  auto q = [&model](const State& u) { return scalar_state(model.entropy_flux(u)); };
  std::vector<double> out;
  out.reserve(phis.size());
  for (const TestFunction& phi : phis) {
    if (phi.amplitude < 0.0) {
      throw PreconditionError("entropy residual needs a nonnegative test function");
    }
    out.push_back(weak_bracket(sol, tau, tau_prime, phi, eta, q)(0));
  }
  return out;
}

std::vector<double> entropy_residual(const SystemModel& model, const ApproxSolution& sol,
                                     double tau, double tau_prime,
                                     const std::vector<TestFunction>& phis) {
  const double tv = sup_tv(sol, tau, tau_prime);
  const auto raw = entropy_brackets(model, sol, tau, tau_prime, phis);
  std::vector<double> out(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    out[k] = normalized(raw[k], normalizer(sol, phis[k], tau, tau_prime, tv));
  }
  return out;
}

ResidualReport certify(const SystemModel& model, const ApproxSolution& sol, double tau,
                       double tau_prime, const std::vector<TestFunction>& phis,
                       double threshold) {
  ResidualReport r;
  r.threshold = threshold;
  r.al_constant = al_check(sol);
  r.weak_residuals = weak_residual(model, sol, tau, tau_prime, phis);
  r.entropy_residuals = entropy_residual(model, sol, tau, tau_prime, phis);
  for (double v : r.weak_residuals) r.weak_certified = std::max(r.weak_certified, v);
  for (double v : r.entropy_residuals) r.entropy_certified = std::max(r.entropy_certified, -v);

  const double tv = sup_tv(sol, tau, tau_prime);
  auto f = [&model](const State& u) { return model.flux(u); };
  auto eta = [&model](const State& u) { return scalar_state(model.entropy(u)); };
  auto q = [&model](const State& u) { return scalar_state(model.entropy_flux(u)); };
  for (const TestFunction& phi : phis) {
    const double den = normalizer(sol, phi, tau, tau_prime, tv);
    const State fine = weak_bracket(sol, tau, tau_prime, phi, identity, f, 1);
    const State coarse = weak_bracket(sol, tau, tau_prime, phi, identity, f, 2);
    r.weak_floor = std::max(r.weak_floor, normalized((fine - coarse).norm() / 3.0, den));
    const double efine = weak_bracket(sol, tau, tau_prime, phi, eta, q, 1)(0);
    const double ecoarse = weak_bracket(sol, tau, tau_prime, phi, eta, q, 2)(0);
    r.entropy_floor = std::max(r.entropy_floor, normalized(std::abs(efine - ecoarse) / 3.0, den));
  }
  r.weak_pass = r.weak_certified <= threshold;
  r.entropy_pass = r.entropy_certified <= threshold;
  return r;
}

RateTable convergence_rate(const ModelPtr& model, const Scheme& scheme,
                           const std::vector<double>& eps_grid, double T, double delta_ref,
                           std::size_t max_samples) {
  if (eps_grid.empty()) throw ConfigError("convergence_rate: empty eps grid");
  for (std::size_t k = 1; k < eps_grid.size(); ++k) {
    if (!(eps_grid[k] < eps_grid[k - 1])) throw ConfigError("convergence_rate: eps grid must decrease");
  }
  if (!(delta_ref < eps_grid.back())) {
    throw ConfigError("convergence_rate: reference delta must be finer than every eps");
  }
  RateTable table;
  for (double eps : eps_grid) {
    const ApproxSolution sol = scheme(eps);
    TrackingOptions options;
    options.record_history = true;
    FrontTrackingRun ref(model, sol.at(0.0), delta_ref, options);
    ref.advance(T);

    std::vector<double> times;
    for (double t : sol.times()) {
      if (t <= T + time_match_tol(eps)) times.push_back(t);
    }
    const std::size_t stride =
        max_samples == 0 ? 1 : std::max<std::size_t>(1, (times.size() + max_samples - 1) / max_samples);
    double sup = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (k % stride != 0 && k + 1 != times.size()) continue;
      const double t = std::min(times[k], T);
      sup = std::max(sup, l1_distance(sol.at(times[k]), ref.snapshot(t)));
    }
    RateRow row;
    row.eps = eps;
    row.distance = sup;
    row.conjecture_ratio = sup / (std::sqrt(eps) * std::abs(std::log(eps)));
    table.rows.push_back(row);
  }

  // Log-log slope and linear-in-eps intercept, both least squares.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double lx = 0, ly = 0, lxx = 0, lxy = 0;
  std::size_t n = 0;
  for (const RateRow& row : table.rows) {
    lx += row.eps;
    ly += row.distance;
    lxx += row.eps * row.eps;
    lxy += row.eps * row.distance;
    if (row.distance > 0.0) {
      const double x = std::log(row.eps);
      const double y = std::log(row.distance);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
  }
  if (n >= 2) {
    const double dn = static_cast<double>(n);
    table.slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  }
  const double m = static_cast<double>(table.rows.size());
  if (table.rows.size() >= 2) {
    const double b = (m * lxy - lx * ly) / (m * lxx - lx * lx);
    table.intercept = (ly - b * lx) / m;
  } else {
    table.intercept = table.rows.front().distance;
  }
  table.monotone = true;
  for (std::size_t k = 1; k < table.rows.size(); ++k) {
    if (table.rows[k].distance > 1.05 * table.rows[k - 1].distance) table.monotone = false;
  }
  return table;
}

ApproxSolution godunov_scheme(const ModelPtr& model, const PiecewiseConstantFn& u0, double eps,
                              double T, double radius, double cfl) {
  if (!(eps > 0.0) || !(radius > 0.0) || !(cfl > 0.0 && cfl <= 1.0)) {
    throw PreconditionError("godunov_scheme: need eps > 0, R > 0 and 0 < cfl <= 1");
  }
  const double speed = model->lambda_hat();
  const double dx = speed * eps / cfl;
  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * radius / dx));
  const int n = model->dim();

  std::vector<double> edges(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j) edges[j] = -radius + dx * static_cast<double>(j);
  std::vector<State> u(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    State avg(n);
    for (int i = 0; i < n; ++i) {
      avg(i) = integrate(u0, edges[j], edges[j + 1], [i](const State& v) { return v(i); }) / dx;
    }
    u[j] = avg;
  }

  auto snapshot = [&]() {
    std::vector<double> xs(edges.begin() + 1, edges.end() - 1);
    return PiecewiseConstantFn(std::move(xs), u).simplified();
  };
  auto interface_flux = [&](const State& a, const State& b) -> State {
    if (a == b) return model->flux(a);
    const WaveFan fan = solve_riemann(model, a, b);
    return model->flux(evaluate_fan(fan, 0.0));
  };

  ApproxSolution sol;
  sol.time_step = eps;
  sol.support_radius = radius;
  sol.snapshots.emplace(0.0, snapshot());
  const auto steps = static_cast<std::size_t>(std::llround(T / eps));
  const double ratio = eps / dx;
  std::vector<State> fluxes(cells + 1);
  for (std::size_t k = 1; k <= steps; ++k) {
    for (std::size_t j = 0; j <= cells; ++j) {
      const State& a = u[j == 0 ? 0 : j - 1];
      const State& b = u[j == cells ? cells - 1 : j];
      fluxes[j] = interface_flux(a, b);
    }
    for (std::size_t j = 0; j < cells; ++j) u[j] -= ratio * (fluxes[j + 1] - fluxes[j]);
    sol.snapshots.emplace(static_cast<double>(k) * eps, snapshot());
  }
  return sol;
}

ApproxSolution front_tracking_scheme(const ModelPtr& model, const PiecewiseConstantFn& u0,
                                     double eps, double T, double radius) {
  const Evolution u = front_tracking_evolution(model, u0, eps, T);
  return sample_evolution(u, eps, T, radius);
}

ApproxSolution read_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ConfigError("cannot open manifest " + manifest.string());
  ApproxSolution sol;
  bool header = false;
  std::string line;
  std::size_t lineno = 0;
  std::map<long long, std::pair<double, std::string>> entries;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string a, b;
    if (!(ls >> a)) continue;
    auto fail = [&](const std::string& what) {
      throw ConfigError(manifest.string() + ":" + std::to_string(lineno) + ": " + what);
    };
    if (!header) {
      if (!(ls >> b) || a.rfind("eps=", 0) != 0 || b.rfind("R=", 0) != 0) {
        fail("expected header `eps=<dt> R=<radius>`");
      }
      try {
        sol.time_step = std::stod(a.substr(4));
        sol.support_radius = std::stod(b.substr(2));
      } catch (const std::exception&) {
        fail("malformed header numbers");
      }
      if (!(sol.time_step > 0.0)) fail("eps must be positive");
      header = true;
      continue;
    }
    if (!(ls >> b)) fail("expected `<time> <file>`");
    double t = 0.0;
    try {
      t = std::stod(a);
    } catch (const std::exception&) {
      fail("malformed time");
    }
    const long long k = std::llround(t / sol.time_step);
    if (entries.count(k)) fail("two snapshots snap to the same grid time");
    sol.snap_error = std::max(sol.snap_error, std::abs(t - static_cast<double>(k) * sol.time_step));
    entries.emplace(k, std::make_pair(t, b));
  }
  if (!header) throw ConfigError(manifest.string() + ": missing header");
  const auto dir = manifest.parent_path();
  for (const auto& [k, entry] : entries) {
    std::ifstream f(dir / entry.second);
    if (!f) throw ConfigError("cannot open snapshot " + (dir / entry.second).string());
    sol.snapshots.emplace(static_cast<double>(k) * sol.time_step, read_text(f));
  }
  return sol;
}

void write_manifest(const std::filesystem::path& dir, const ApproxSolution& sol,
                    const std::string& stem) {
  std::filesystem::create_directories(dir);
  std::ofstream m(dir / "manifest.txt");
  char buf[128];
  std::snprintf(buf, sizeof buf, "eps=%.17g R=%.17g\n", sol.time_step, sol.support_radius);
  m << buf;
  std::size_t k = 0;
  for (const auto& [t, u] : sol.snapshots) {
    std::snprintf(buf, sizeof buf, "%s_%06zu.txt", stem.c_str(), k++);
    const std::string name = buf;
    std::ofstream f(dir / name);
    write_text(f, u);
    std::snprintf(buf, sizeof buf, "%.17g ", t);
    m << buf << name << '\n';
  }
  if (!m) throw ConfigError("failed writing manifest in " + dir.string());
}

}  // namespace frontlab
