#pragma once

#include "frontlab/bv.hpp"
#include "frontlab/model.hpp"
#include "frontlab/riemann.hpp"

#include <cstdint>
#include <iosfwd>
#include <list>
#include <memory>
#include <set>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace frontlab {

/// A straight-line discontinuity x(t) = x0 + speed (t - t0), born at t0.
/// Rarefactions appear as several fronts of kind Rarefaction, each a small jump
/// moving at the characteristic speed of its right state.
struct Front {
  std::uint64_t id = 0;
  double x0 = 0.0;
  double t0 = 0.0;
  double speed = 0.0;
  Wave wave;

  double position(double t) const { return x0 + speed * (t - t0); }
  double strength() const { return wave.strength(); }
};

struct InteractionRecord {
  double time = 0.0;
  double x = 0.0;
  int left_family = 0;
  int right_family = 0;
  double tv_after = 0.0;
};

struct TrackingOptions {
  bool record_history = false;
  std::size_t max_events = 1'000'000;
  double start_time = 0.0;
};

/// Split a fan into fronts anchored at (x, t). Rarefactions become ceil(strength/delta)
/// pieces spaced uniformly in characteristic speed, refined until each is <= delta.
std::vector<Front> fan_to_fronts(const SystemModel& model, const std::vector<Wave>& waves,
                                 double x, double t, double delta);

/// Event-driven front tracking. Every interaction is resolved by the exact Riemann
/// solver; no simplified solver and no non-physical fronts.
class FrontTrackingRun {
 public:
  FrontTrackingRun(ModelPtr model, const PiecewiseConstantFn& u0, double delta,
                   TrackingOptions options = {});

  const ModelPtr& model() const { return model_; }
  double delta() const { return delta_; }
  double current_time() const { return time_; }
  bool records_history() const { return options_.record_history; }

  std::vector<Front> fronts() const { return {live_.begin(), live_.end()}; }
  std::size_t front_count() const { return live_.size(); }
  std::size_t event_count() const { return log_.size(); }
  const std::vector<InteractionRecord>& event_log() const { return log_; }
  /// Sum of front strengths at the current time (the TV of the snapshot).
  double total_variation() const;

  void advance(double t_target);

  PiecewiseConstantFn snapshot() const;
  /// Snapshot at an earlier time; requires record_history unless t is the current time.
  PiecewiseConstantFn snapshot(double t) const;

  /// Immutable view of the recorded history, valid for t in [start, current_time].
  Evolution trajectory() const;

  void write_event_log(std::ostream& os) const;

 private:
  using Iter = std::list<Front>::iterator;
  using Event = std::tuple<double, double, std::uint64_t, std::uint64_t>;

  /// Every front ever created, indexed by id, plus the left-to-right order of the
  /// live fronts after each event. Shared immutably with trajectories.
  struct History {
    double start = 0.0;
    State left_tail;
    std::vector<Front> fronts;
    std::vector<double> epoch_start;
    std::vector<std::shared_ptr<const std::vector<std::uint64_t>>> epoch_order;

    PiecewiseConstantFn at(double t) const;
  };

  void schedule(Iter left);
  void record_epoch();
  void collide(const Event& ev);

  ModelPtr model_;
  double delta_;
  TrackingOptions options_;
  double time_;
  State left_tail_;
  std::uint64_t next_id_ = 0;

  std::list<Front> live_;
  std::unordered_map<std::uint64_t, Iter> index_;
  std::set<Event> events_;
  std::vector<InteractionRecord> log_;
  History history_;
};

FrontTrackingRun init_fronts(ModelPtr model, const PiecewiseConstantFn& u0, double delta,
                             TrackingOptions options = {});

/// S_t u0 at resolution delta.
PiecewiseConstantFn semigroup(ModelPtr model, const PiecewiseConstantFn& u0, double t,
                              double delta);

/// Run with history to `horizon` and return u(t) for t in [0, horizon].
Evolution front_tracking_evolution(ModelPtr model, const PiecewiseConstantFn& u0, double delta,
                                   double horizon);

/// |S_t u0 - S_s v0|_1 / (|t - s| + |u0 - v0|_1).
double lipschitz_probe(ModelPtr model, const PiecewiseConstantFn& u0,
                       const PiecewiseConstantFn& v0, double s, double t, double delta);

/// Largest lipschitz_probe ratio over translates of u0 by fractions of its support
/// and over time offsets. Used as the L estimate in the error functional check.
double lipschitz_certificate(ModelPtr model, const PiecewiseConstantFn& u0, double horizon,
                             double delta, std::size_t probes, std::uint64_t seed);

/// |u(t2) - u(t1)|_1 / (t2 - t1).
double time_lipschitz_probe(const Evolution& u, double t1, double t2);
double time_lipschitz_probe(const FrontTrackingRun& run, double t1, double t2);

}  // namespace frontlab
