#include "tollsim/tolling.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tollsim/csv.hpp"
#include "tollsim/error.hpp"

namespace tollsim {

DelayTable DelayTable::from_vehicle_delays(const VehicleDelays& delays, int interval_s) {
  DelayTable table(interval_s);
  for (const auto& [key, list] : delays) {
    if (list.empty()) continue;
    table.set(key.first, key.second, Cell{average_delay(list), static_cast<int>(list.size())});
  }
  return table;
}

void TollSchedule::set(LinkId link, int interval, double toll) {
  auto& row = tolls_[link];
  if (row.empty()) row.assign(static_cast<std::size_t>(intervals()), 0.0);
  row.at(static_cast<std::size_t>(interval)) = toll;
}

double TollSchedule::at(LinkId link, int interval) const {
  auto it = tolls_.find(link);
  if (it == tolls_.end()) return 0.0;
  return it->second.at(static_cast<std::size_t>(interval));
}

double average_delay(std::span<const double> delays) {
  if (delays.empty()) return 0.0;
  double sum = 0.0;
  for (double d : delays) sum += d;
  return sum / static_cast<double>(delays.size());
}

double threshold_delay(double d0, double d_min) { return d0 >= d_min ? d0 : 0.0; }

TollSchedule update_tolls(const DelayTable& delays, const TollParams& params, const TollSchedule* previous) {
  TollSchedule next(params.interval_s);
  const double alpha = params.smoothing;
  for (const auto& [key, cell] : delays.cells()) {
    const double d = threshold_delay(cell.d0, params.d_min_s);
    const double raw = std::max(0.0, params.k_p * d);
    double m = raw;
    if (alpha < 1.0 && previous != nullptr) m = alpha * raw + (1.0 - alpha) * previous->at(key.first, key.second);
    if (m > 0.0) next.set(key.first, key.second, m);
  }
  if (alpha < 1.0 && previous != nullptr) {
    // cells with no traffic this iteration decay towards zero
    for (const auto& [link, row] : previous->by_link()) {
      for (int k = 0; k < static_cast<int>(row.size()); ++k) {
        if (row[k] <= 0.0 || delays.cells().contains({link, k})) continue;
        next.set(link, k, (1.0 - alpha) * row[k]);
      }
    }
  }
  return next;
}

double toll_for(LinkId link, double time, const TollSchedule& schedule) {
  return schedule.at(link, interval_of(time, schedule.interval_s()));
}

void write_toll_schedule(const std::filesystem::path& path, const TollSchedule& schedule) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "link,interval_start_s,toll\n";
  for (const auto& [link, row] : schedule.by_link()) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] == 0.0) continue;
      out << link << ',' << k * static_cast<std::size_t>(schedule.interval_s()) << ',' << csv::fmt(row[k]) << '\n';
    }
  }
}

TollSchedule read_toll_schedule(const std::filesystem::path& path, int interval_s) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.filename().string(), "document", "file", "missing file " + path.string());
  TollSchedule schedule(interval_s);
  std::string line;
  std::getline(in, line);
  if (line != "link,interval_start_s,toll")
    throw ValidationError(path.filename().string(), "header", "columns", "unexpected header");
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cols = csv::split(line);
    const std::string r = "row " + std::to_string(row);
    if (cols.size() != 3) throw ValidationError(path.filename().string(), r, "columns", "expected 3 columns");
    const auto link = csv::parse<LinkId>(cols[0], path.filename().string(), r, "link");
    const auto start = csv::parse<int>(cols[1], path.filename().string(), r, "interval_start_s");
    const auto toll = csv::parse<double>(cols[2], path.filename().string(), r, "toll");
    if (start % interval_s != 0 || start < 0 || start >= kDaySeconds)
      throw ValidationError(path.filename().string(), r, "interval_start_s", "not an interval boundary");
    if (toll < 0.0) throw ValidationError(path.filename().string(), r, "toll", "must be >= 0");
    schedule.set(link, start / interval_s, toll);
  }
  return schedule;
}

}  // namespace tollsim
