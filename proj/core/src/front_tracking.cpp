#include "frontlab/front_tracking.hpp"

#include "frontlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace frontlab {

namespace {

constexpr double kPieceSlack = 1e-9;

// Queries a hair past the horizon (tau + h rounding) are extrapolated.
double horizon_tolerance(double t) { return 1e-9 * std::max(1.0, std::abs(t)); }

}  // namespace

std::vector<Front> fan_to_fronts(const SystemModel& model, const std::vector<Wave>& waves,
                                 double x, double t, double delta) {
  std::vector<Front> out;
  for (const Wave& w : waves) {
    if (w.kind != WaveKind::Rarefaction) {
      Front f;
      f.x0 = x;
      f.t0 = t;
      f.speed = w.speed_lo;
      f.wave = w;
      out.push_back(std::move(f));
      continue;
    }
    const double strength = w.strength();
    auto m = static_cast<std::size_t>(std::max(1.0, std::ceil(strength / delta - kPieceSlack)));
    std::vector<State> states;
    for (;;) {
      states.assign(1, w.left);
      for (std::size_t j = 1; j < m; ++j) {
        const double xi = w.speed_lo + (w.speed_hi - w.speed_lo) * static_cast<double>(j) /
                                           static_cast<double>(m);
        states.push_back(rarefaction_state(model, w.family, w.left, xi));
      }
      states.push_back(w.right);
      double longest = 0.0;
      for (std::size_t j = 1; j < states.size(); ++j) {
        longest = std::max(longest, distance(states[j - 1], states[j]));
      }
      if (longest <= delta * (1.0 + kPieceSlack) || m > 1'000'000) break;
      ++m;
    }
    for (std::size_t j = 1; j < states.size(); ++j) {
      Front f;
      f.x0 = x;
      f.t0 = t;
      f.speed = model.characteristic_speed(w.family, states[j]);
      f.wave.family = w.family;
      f.wave.kind = WaveKind::Rarefaction;
      f.wave.left = states[j - 1];
      f.wave.right = states[j];
      f.wave.speed_lo = f.wave.speed_hi = f.speed;
      out.push_back(std::move(f));
    }
  }
  return out;
}

FrontTrackingRun::FrontTrackingRun(ModelPtr model, const PiecewiseConstantFn& u0, double delta,
                                   TrackingOptions options)
    : model_(std::move(model)),
      delta_(delta),
      options_(options),
      time_(options.start_time),
      left_tail_(u0.left_tail()) {
  if (!(delta > 0.0)) throw PreconditionError("front tracking: delta must be positive");
  for (const State& v : u0.values()) model_->require_in_domain(v, "front tracking initial datum");
  history_.start = time_;
  history_.left_tail = left_tail_;

  const auto xs = u0.breakpoints();
  const auto vs = u0.values();
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto waves = riemann_waves(*model_, vs[k], vs[k + 1]);
    for (Front& f : fan_to_fronts(*model_, waves, xs[k], time_, delta_)) {
      f.id = next_id_++;
      if (options_.record_history) history_.fronts.push_back(f);
      live_.push_back(std::move(f));
      index_.emplace(live_.back().id, std::prev(live_.end()));
    }
  }
  for (auto it = live_.begin(); it != live_.end(); ++it) schedule(it);
  record_epoch();
}

double FrontTrackingRun::total_variation() const {
  double tv = 0.0;
  for (const Front& f : live_) tv += f.strength();
  return tv;
}

void FrontTrackingRun::schedule(Iter left) {
  if (left == live_.end()) return;
  const Iter right = std::next(left);
  if (right == live_.end()) return;
  const double closing = left->speed - right->speed;
  if (!(closing > 0.0)) return;
  const double t_ref = std::max(left->t0, right->t0);
  const double gap = right->position(t_ref) - left->position(t_ref);
  const double tc = std::max(time_, t_ref + std::max(0.0, gap) / closing);
  const double x = 0.5 * (left->position(tc) + right->position(tc));
  events_.emplace(tc, x, left->id, right->id);
}

void FrontTrackingRun::record_epoch() {
  if (!options_.record_history) return;
  auto order = std::make_shared<std::vector<std::uint64_t>>();
  order->reserve(live_.size());
  for (const Front& f : live_) order->push_back(f.id);
  history_.epoch_start.push_back(time_);
  history_.epoch_order.push_back(std::move(order));
}

void FrontTrackingRun::collide(const Event& ev) {
  const auto [tc, x, left_id, right_id] = ev;
  const Iter a = index_.at(left_id);
  const Iter b = index_.at(right_id);
  time_ = tc;
  const int left_family = a->wave.family;
  const int right_family = b->wave.family;
  const auto waves = riemann_waves(*model_, a->wave.left, b->wave.right);

  const Iter after = std::next(b);
  index_.erase(left_id);
  index_.erase(right_id);
  live_.erase(a);
  live_.erase(b);

  auto fresh = fan_to_fronts(*model_, waves, x, tc, delta_);
  Iter first = after;
  Iter last = after;
  for (std::size_t k = 0; k < fresh.size(); ++k) {
    fresh[k].id = next_id_++;
    if (options_.record_history) history_.fronts.push_back(fresh[k]);
    const Iter it = live_.insert(after, std::move(fresh[k]));
    index_.emplace(it->id, it);
    if (k == 0) first = it;
    last = it;
  }
  // Fronts of the new fan diverge from each other; only the outer pairs can meet.
  if (first != live_.begin()) schedule(std::prev(first));
  if (last != after) schedule(last);

  log_.push_back({tc, x, left_family, right_family, total_variation()});
  record_epoch();
}

void FrontTrackingRun::advance(double t_target) {
  if (t_target < time_) throw PreconditionError("advance: target time is in the past");
  while (!events_.empty()) {
    const Event ev = *events_.begin();
    if (std::get<0>(ev) > t_target) break;
    events_.erase(events_.begin());
    const auto ia = index_.find(std::get<2>(ev));
    const auto ib = index_.find(std::get<3>(ev));
    if (ia == index_.end() || ib == index_.end() || std::next(ia->second) != ib->second) continue;
    if (log_.size() >= options_.max_events) {
      std::ostringstream msg;
      msg << "front tracking exceeded " << options_.max_events << " interactions at t=" << time_
          << "; TV history:";
      const std::size_t stride = std::max<std::size_t>(1, log_.size() / 8);
      for (std::size_t k = 0; k < log_.size(); k += stride) {
        msg << ' ' << log_[k].time << ':' << log_[k].tv_after;
      }
      throw InteractionBlowup(msg.str());
    }
    collide(ev);
  }
  time_ = t_target;
}

PiecewiseConstantFn FrontTrackingRun::snapshot() const {
  std::vector<double> xs;
  std::vector<State> vs{left_tail_};
  xs.reserve(live_.size());
  vs.reserve(live_.size() + 1);
  for (const Front& f : live_) {
    const double x = f.position(time_);
    xs.push_back(xs.empty() ? x : std::max(x, xs.back()));
    vs.push_back(f.wave.right);
  }
  return PiecewiseConstantFn(std::move(xs), std::move(vs));
}

PiecewiseConstantFn FrontTrackingRun::History::at(double t) const {
  if (t < start) throw PreconditionError("front tracking history queried before its start");
  const auto it = std::upper_bound(epoch_start.begin(), epoch_start.end(), t);
  const auto& order = *epoch_order[static_cast<std::size_t>(it - epoch_start.begin()) - 1];
  std::vector<double> xs;
  std::vector<State> vs{left_tail};
  xs.reserve(order.size());
  vs.reserve(order.size() + 1);
  for (std::uint64_t id : order) {
    const Front& f = fronts[id];
    const double x = f.position(t);
    xs.push_back(xs.empty() ? x : std::max(x, xs.back()));
    vs.push_back(f.wave.right);
  }
  return PiecewiseConstantFn(std::move(xs), std::move(vs));
}

PiecewiseConstantFn FrontTrackingRun::snapshot(double t) const {
  if (t == time_) return snapshot();
  if (!options_.record_history) {
    throw PreconditionError("snapshot at a past time needs record_history");
  }
  if (t > time_ + horizon_tolerance(time_)) {
    throw PreconditionError("snapshot requested beyond the advanced time");
  }
  return history_.at(t);
}

Evolution FrontTrackingRun::trajectory() const {
  if (!options_.record_history) throw PreconditionError("trajectory needs record_history");
  auto hist = std::make_shared<const History>(history_);
  const double end = time_;
  return [hist, end](double t) {
    if (t > end + horizon_tolerance(end)) {
      throw PreconditionError("trajectory queried beyond its horizon");
    }
    return hist->at(t);
  };
}

void FrontTrackingRun::write_event_log(std::ostream& os) const {
  os << "time,x,left_family,right_family,tv_after\n";
  char buf[160];
  for (const InteractionRecord& r : log_) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%d,%.17g\n", r.time, r.x, r.left_family,
                  r.right_family, r.tv_after);
    os << buf;
  }
}

FrontTrackingRun init_fronts(ModelPtr model, const PiecewiseConstantFn& u0, double delta,
                             TrackingOptions options) {
  return FrontTrackingRun(std::move(model), u0, delta, options);
}

PiecewiseConstantFn semigroup(ModelPtr model, const PiecewiseConstantFn& u0, double t,
                              double delta) {
  if (t < 0.0) throw PreconditionError("semigroup: negative time");
  FrontTrackingRun run(std::move(model), u0, delta);
  run.advance(t);
  return run.snapshot();
}

Evolution front_tracking_evolution(ModelPtr model, const PiecewiseConstantFn& u0, double delta,
                                   double horizon) {
  TrackingOptions options;
  options.record_history = true;
  FrontTrackingRun run(std::move(model), u0, delta, options);
  run.advance(horizon);
  return run.trajectory();
}

double lipschitz_probe(ModelPtr model, const PiecewiseConstantFn& u0,
                       const PiecewiseConstantFn& v0, double s, double t, double delta) {
  const double den = std::abs(t - s) + l1_distance(u0, v0);
  if (!(den > 0.0)) throw PreconditionError("lipschitz_probe: identical data and times");
  const auto a = semigroup(model, u0, t, delta);
  const auto b = semigroup(model, v0, s, delta);
  return l1_distance(a, b) / den;
}

double lipschitz_certificate(ModelPtr model, const PiecewiseConstantFn& u0, double horizon,
                             double delta, std::size_t probes, std::uint64_t seed) {
  const auto xs = u0.breakpoints();
  if (xs.empty()) return 0.0;
  const double width = std::max(1.0, xs.back() - xs.front());
  CounterRng rng(seed, 0x11f5);
  double best = 0.0;
  for (std::size_t k = 0; k < probes; ++k) {
    const double dx = rng.uniform(-0.1, 0.1) * width;
    const double t = rng.uniform(0.0, horizon);
    // Even probes perturb only the datum, odd ones also the time.
    const double jitter = rng.uniform(-0.1, 0.1) * horizon;
    const double s = k % 2 == 0 ? t : std::clamp(t + jitter, 0.0, horizon);
    const auto v0 = u0.translated(dx);
    if (std::abs(t - s) + l1_distance(u0, v0) == 0.0) continue;
    best = std::max(best, lipschitz_probe(model, u0, v0, s, t, delta));
  }
  return best;
}

double time_lipschitz_probe(const Evolution& u, double t1, double t2) {
  if (!(t2 > t1)) throw PreconditionError("time_lipschitz_probe: need t1 < t2");
  return l1_distance(u(t2), u(t1)) / (t2 - t1);
}

double time_lipschitz_probe(const FrontTrackingRun& run, double t1, double t2) {
  if (!(t2 > t1)) throw PreconditionError("time_lipschitz_probe: need t1 < t2");
  return l1_distance(run.snapshot(t2), run.snapshot(t1)) / (t2 - t1);
}

}  // namespace frontlab
