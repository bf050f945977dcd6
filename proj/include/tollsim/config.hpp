#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "tollsim/mode.hpp"

namespace tollsim {

using Json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;

/// Run-level switches. Scenario kinds are presets over these fields.
struct ScenarioConfig {
  double sample_scale = 0.1;
  double capacity_multiplier = 1.0;
  double pt_constant_multiplier = 1.0;
  int iterations = 100;
  double innovation_fraction = 0.8;
  std::uint64_t rng_seed = 4711;
  bool toll_enabled = false;
};

/// Utility-function parameters. Rates are per hour, distance terms per meter.
struct ScoringParams {
  double beta_perf = 6.0;
  double beta_wait = -3.0;
  double beta_late = -18.0;
  double beta_early = 0.0;
  double beta_short = 0.0;  // must stay 0
  double zeta_hours = 10.0;
  double min_duration_s = 1.0;
  double short_penalty = -100.0;
  double beta_m = 1.0;
  double beta_transfer = -1.0;
  PerMode<double> beta_trav{-6.0, -6.0, -3.0, -6.0, -6.0, -6.0};
  PerMode<double> constant{0.0, -1.0, -2.0, -1.0, 0.0, 0.0};
  PerMode<double> beta_d{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  PerMode<double> gamma_d{-0.0002, -0.0002, 0.0, 0.0, 0.0, -0.0002};
  /// Overrides the value computed from the loaded population when set.
  std::optional<double> population_average_income;
};

struct TeleportParams {
  double speed = 1.0;           // m/s
  double beeline_factor = 1.3;
};

struct MobsimParams {
  double cell_length = 7.5;
  int stuck_time_s = 3600;
  PerMode<TeleportParams> teleport{TeleportParams{}, TeleportParams{}, TeleportParams{8.0, 1.3},
                                   TeleportParams{4.0, 1.3}, TeleportParams{1.25, 1.3}, TeleportParams{}};
  PerMode<bool> toll_exempt{false, false, false, false, false, false};
};

struct TollParams {
  int interval_s = 900;
  double k_p = 0.005;  // currency per second of average delay
  double d_min_s = 1.0;
  double smoothing = 1.0;
};

struct StrategyConfig {
  double w_select = 0.7;
  double w_reroute = 0.1;
  double w_time_mutate = 0.1;
  double w_mode_change = 0.1;
  int mutation_range_s = 1800;
  double temperature = 1.0;
  int memory_max = 5;
};

struct AnalysisParams {
  double departure_shift_threshold_s = 300.0;
  double ef_km_g = 181.887;
  double ef_hour_kg = 11.56;
  double days_per_year = 365.0;
  /// Price-level factor applied to simulated monetary values before reporting.
  double monetary_cpi_factor = 1.0;
};

struct Config {
  ScenarioConfig scenario;
  ScoringParams scoring;
  MobsimParams mobsim;
  TollParams tolling;
  StrategyConfig strategy;
  AnalysisParams analysis;
};

/// Throws ValidationError naming `file` and the offending field.
void validate(const Config& cfg, const std::string& file = "config.json");

Json to_json(const Config& cfg);
/// Missing keys keep their defaults; present keys must have the right type.
Config config_from_json(const Json& j, const std::string& file = "config.json");

}  // namespace tollsim
