#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "tollsim/events.hpp"
#include "tollsim/mobsim.hpp"
#include "tollsim/scenario.hpp"
#include "tollsim/tolling.hpp"

namespace tollsim {

enum class ScenarioKind { reference, congestion, congestion_plus };

std::string_view to_string(ScenarioKind k) noexcept;
std::optional<ScenarioKind> parse_scenario_kind(std::string_view s) noexcept;

/// Sets toll_enabled and the two multipliers for the named scenario; other fields are kept.
ScenarioConfig preset(ScenarioKind kind, ScenarioConfig base);

/// True when replanning in local iteration `k` (1-based) of an `n`-iteration run may create
/// new plans.
bool innovation_active(int k, int n, double innovation_fraction);

struct IterationStats {
  int iteration = 0;
  double mean_score = 0.0;  // executed plans
  double mean_best = 0.0;
  double mean_worst = 0.0;
  int car_trips = 0;
  double delay_hours = 0.0;
  double toll_revenue = 0.0;
  int forced_moves = 0;
};

struct RunOptions {
  int first_iteration = 1;
  TollSchedule initial_tolls = TollSchedule(900);  // applied in the first iteration when tolling is on
  std::filesystem::path output_dir;  // empty: nothing is written
  bool write_toll_history = true;
};

struct RunResult {
  Scenario scenario;         // population after the last iteration, plans scored
  EventLog events;           // last iteration
  TollSchedule tolls;        // applied in the last iteration
  TollSchedule next_tolls;   // computed from the last iteration
  std::vector<IterationStats> stats;
};

/// The iterative loop: mobsim, delay measurement, toll update (when enabled), scoring and
/// replanning. `scenario` must already carry its modifiers.
RunResult run_loop(Scenario scenario, const RunOptions& options = {});

/// Per-agent marginal utility of money for a scenario, in population order.
std::vector<double> agent_beta_m(const Scenario& s);

/// Scores every agent's selected plan against an event log and stores the score.
void score_population(Population& pop, const EventLog& log, const ScoringParams& p, const std::vector<double>& beta_m);

void write_iteration_stats(const std::filesystem::path& path, const std::vector<IterationStats>& stats);
void write_score_stats(const std::filesystem::path& path, const std::vector<IterationStats>& stats);
std::vector<IterationStats> read_iteration_stats(const std::filesystem::path& path);

}  // namespace tollsim
