#pragma once

#include <vector>

#include "tollsim/config.hpp"
#include "tollsim/events.hpp"
#include "tollsim/scenario.hpp"
#include "tollsim/tolling.hpp"

namespace tollsim {

/// Mean car travel time per link and time bin, binned by link entry time. Bins without
/// observations hold the link's free-flow time.
class TravelTimeTable {
 public:
  TravelTimeTable() = default;
  TravelTimeTable(const Network& net, int bin_s);

  int bin_s() const noexcept { return bin_s_; }
  /// Travel time for the link with index `link_idx` when entered at `time`.
  double get(std::size_t link_idx, double time) const;
  void set(std::size_t link_idx, int bin, double tt);
  bool empty() const noexcept { return tt_.empty(); }

 private:
  int bin_s_ = 900;
  int bins_ = 0;
  std::vector<double> tt_;  // link-major
};

struct MobsimResult {
  EventLog events;
  TravelTimeTable travel_times;
  int forced_moves = 0;  // deadlock-guard interventions
};

/// Executes every agent's selected plan for one day on the queue network.
///
/// Links are FIFO point queues. A vehicle may leave once its free-flow time has elapsed, an
/// outflow token is available (tokens accrue at flow_capacity * sample_scale per hour, at most
/// max(1, rate per second) banked), and the next link has storage left. Storage is
/// floor(length * lanes / cell_length) * sample_scale vehicles, at least 1. Tolls are charged
/// on link exit at the rate of the exit interval.
MobsimResult run_mobsim(const Scenario& scenario, const TollSchedule& tolls);

/// Same, with explicit parameters.
MobsimResult run_mobsim(const Network& net, const Population& pop, const TollSchedule& tolls,
                        const MobsimParams& params, double sample_scale, int bin_s);

/// Travel time in seconds of a teleported leg.
double teleport_leg(Mode mode, double beeline_distance, const MobsimParams& params);
/// Distance recorded for a teleported leg.
double teleport_distance(Mode mode, double beeline_distance, const MobsimParams& params);

double beeline(const Network& net, LinkId a, LinkId b);

/// Delay of every car-class vehicle leaving each link, floored at 0, keyed by the interval
/// that contains the link_leave time.
VehicleDelays measure_delay_events(const EventLog& log, const Network& net, int interval_s);

}  // namespace tollsim
