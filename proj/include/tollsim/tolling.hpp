#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "tollsim/config.hpp"
#include "tollsim/scenario.hpp"

namespace tollsim {

/// Interval index for a time of day; times past midnight fall into the last interval.
inline int interval_of(double time, int interval_s) {
  const int n = kDaySeconds / interval_s;
  if (time < 0.0) return 0;
  const int k = static_cast<int>(time / interval_s);
  return k < n ? k : n - 1;
}

/// Per-vehicle delays keyed by (link, interval of the link_leave time).
using VehicleDelays = std::map<std::pair<LinkId, int>, std::vector<double>>;

/// Average delay and vehicle count per (link, interval); only cells with traffic exist.
class DelayTable {
 public:
  struct Cell {
    double d0 = 0.0;
    int count = 0;
  };

  explicit DelayTable(int interval_s = 900) : interval_s_(interval_s) {}

  static DelayTable from_vehicle_delays(const VehicleDelays& delays, int interval_s);

  void set(LinkId link, int interval, Cell cell) { cells_[{link, interval}] = cell; }
  const std::map<std::pair<LinkId, int>, Cell>& cells() const noexcept { return cells_; }
  int interval_s() const noexcept { return interval_s_; }

 private:
  int interval_s_;
  std::map<std::pair<LinkId, int>, Cell> cells_;
};

/// Per-link, per-interval charge. Links without an entry are untolled.
class TollSchedule {
 public:
  explicit TollSchedule(int interval_s = 900) : interval_s_(interval_s) {}

  int interval_s() const noexcept { return interval_s_; }
  int intervals() const noexcept { return kDaySeconds / interval_s_; }

  void set(LinkId link, int interval, double toll);
  double at(LinkId link, int interval) const;
  bool empty() const noexcept { return tolls_.empty(); }
  const std::map<LinkId, std::vector<double>>& by_link() const noexcept { return tolls_; }

  bool operator==(const TollSchedule&) const = default;

 private:
  int interval_s_;
  std::map<LinkId, std::vector<double>> tolls_;
};

/// Mean of the (already nonnegative) per-vehicle delays. Empty input gives 0.
double average_delay(std::span<const double> delays);

/// d0 if d0 >= d_min, else 0.
double threshold_delay(double d0, double d_min);

/// Proportional controller: m = max(0, K_p * thresholded delay), optionally blended with the
/// previous schedule as m = alpha * m + (1 - alpha) * m_prev.
TollSchedule update_tolls(const DelayTable& delays, const TollParams& params, const TollSchedule* previous = nullptr);

double toll_for(LinkId link, double time, const TollSchedule& schedule);

/// CSV with columns link,interval_start_s,toll; zero cells are omitted.
void write_toll_schedule(const std::filesystem::path& path, const TollSchedule& schedule);
TollSchedule read_toll_schedule(const std::filesystem::path& path, int interval_s);

}  // namespace tollsim
