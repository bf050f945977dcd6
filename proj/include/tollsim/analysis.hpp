#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "tollsim/config.hpp"
#include "tollsim/events.hpp"
#include "tollsim/scenario.hpp"

namespace tollsim::analysis {

/// Daily sample value to an annual full-population value: x * sample_factor * days.
double upscale(double daily, double sample_factor = 10.0, double days = 365.0);

struct Kpis {
  double avg_toll_per_trip = 0.0;
  double max_toll_per_trip = 0.0;
  double avg_toll_per_km = 0.0;
  double toll_revenue = 0.0;
  double delay_hours = 0.0;  // car-class vehicles
  double car_trips = 0.0;
  double car_km = 0.0;
  double avg_km_per_trip = 0.0;

  bool operator==(const Kpis&) const = default;
};

/// Daily KPIs of one event log. A trip is one car leg; tolls are the money paid on car legs
/// for the per-trip figures and all money events for revenue.
Kpis traffic_kpis(const EventLog& log, const Network& net, int interval_s);

/// Totals upscaled; per-trip and per-km ratios carried unchanged. Revenue is further
/// multiplied by `cpi_factor`.
Kpis annualize(const Kpis& daily, double sample_factor, double days, double cpi_factor = 1.0);

struct Delta {
  double reference = 0.0;
  double policy = 0.0;
  double change = 0.0;
  double percent = 0.0;  // 0 when the reference is 0
};

Delta delta(double reference, double policy);

struct KpiRow {
  std::string indicator;
  Delta daily;
  Delta annual;
};

/// Side-by-side KPIs with absolute and relative changes.
std::vector<KpiRow> compare_kpis(const Kpis& ref, const Kpis& policy, double sample_factor, double days,
                                 double cpi_factor);

enum class Transition { car2car, car2pt, pt2car, pt2pt, other };
inline constexpr std::size_t kTransitionCount = 5;
std::string_view to_string(Transition t) noexcept;
Transition classify(Mode ref, Mode policy) noexcept;

struct ShiftReport {
  std::array<int, kTransitionCount> trips{};
  std::array<int, kTransitionCount> departure_shifted{};
  std::array<double, kTransitionCount> km{};  // reference-leg distance
  std::array<double, kTransitionCount> departure_shifted_km{};
  double km_car_to_pt = 0.0;
  int unmatched_agents = 0;

  double shift_share(Transition t) const;
};

/// Matches trips by agent and leg position. Agents whose trip counts differ are counted in
/// `unmatched_agents` and skipped.
ShiftReport behavioral_shift(const std::vector<ExecutedPlan>& ref, const std::vector<ExecutedPlan>& policy,
                             double threshold_s);

/// Tonnes of CO2: km * ef_km_g / 1e6 + hours * ef_hour_kg / 1e3.
double emissions_delta_t(double car_km_delta, double delay_hours_delta, double ef_km_g, double ef_hour_kg);

struct WelfareReport {
  double revenue = 0.0;
  double utility_change_money = 0.0;  // sum of per-agent utility changes in currency
  double net = 0.0;
};

/// net = revenue + sum(du_i / beta_i).
WelfareReport welfare(double revenue, const std::vector<double>& utility_change, const std::vector<double>& beta_m);

/// One agent's outcome in the policy run relative to the reference.
struct AgentOutcome {
  AgentId id = 0;
  double income = 0.0;
  ZoneId zone = 0;
  double toll = 0.0;  // paid, positive
  double beta_m = 1.0;
  double utility_change = 0.0;
};

struct DecileRow {
  int decile = 0;  // 1 = highest incomes
  int agents = 0;
  double min_income = 0.0;
  double max_income = 0.0;
  double total_toll = 0.0;
  double mean_toll = 0.0;
  double mean_toll_utils = 0.0;
  double total_utility_change = 0.0;
  double mean_utility_change = 0.0;
  double revenue_share = 0.0;
};

/// Income deciles, richest first; sizes differ by at most one. Throws Error with fewer than
/// ten agents.
std::vector<DecileRow> vertical_distribution(const std::vector<AgentOutcome>& agents);

struct ZoneRow {
  ZoneId zone = 0;
  ZoneClass classification = ZoneClass::outer;
  int population = 0;
  double total_toll = 0.0;
  double total_utility_change = 0.0;
  double mean_toll = 0.0;
  double mean_utility_change = 0.0;
};

/// Per home zone; zones without residents are reported with population 0. Throws Error for
/// an agent whose zone is unknown.
std::vector<ZoneRow> horizontal_distribution(const std::vector<AgentOutcome>& agents, const Zones& zones);

/// Everything a run directory holds that the comparison needs.
struct RunData {
  std::filesystem::path dir;
  Scenario scenario;
  EventLog events;
  Json manifest;
};

RunData load_run(const std::filesystem::path& dir);

/// Person agents of the policy run with tolls paid and score changes against the reference.
/// Throws Error when the populations differ.
std::vector<AgentOutcome> agent_outcomes(const RunData& ref, const RunData& policy);

struct Comparison {
  Kpis ref_daily;
  Kpis policy_daily;
  std::vector<KpiRow> kpis;
  ShiftReport shifts;
  double co2_km_t = 0.0;
  double co2_delay_t = 0.0;
  WelfareReport welfare_daily;
  WelfareReport welfare_annual;
  std::vector<DecileRow> deciles;
  std::vector<ZoneRow> zones;
};

Comparison compare_runs(const RunData& ref, const RunData& policy);

/// Writes kpis.csv, shifts.csv, deciles.csv, zones.csv and welfare.csv.
void write_reports(const std::filesystem::path& dir, const Comparison& c);

}  // namespace tollsim::analysis
