#include "tollsim/controller.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "tollsim/csv.hpp"
#include "tollsim/error.hpp"
#include "tollsim/replanning.hpp"
#include "tollsim/rng.hpp"
#include "tollsim/router.hpp"
#include "tollsim/scoring.hpp"

namespace tollsim {

namespace fs = std::filesystem;

namespace {
constexpr std::array<std::string_view, 3> kKindNames = {"reference", "congestion", "congestion_plus"};
}

std::string_view to_string(ScenarioKind k) noexcept { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<ScenarioKind> parse_scenario_kind(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<ScenarioKind>(i);
  }
  return std::nullopt;
}

ScenarioConfig preset(ScenarioKind kind, ScenarioConfig base) {
  base.toll_enabled = kind != ScenarioKind::reference;
  base.capacity_multiplier = kind == ScenarioKind::congestion_plus ? 1.1 : 1.0;
  base.pt_constant_multiplier = kind == ScenarioKind::congestion_plus ? 0.8 : 1.0;
  return base;
}

bool innovation_active(int k, int n, double innovation_fraction) {
  return k <= static_cast<int>(std::floor(innovation_fraction * n + 1e-9));
}

std::vector<double> agent_beta_m(const Scenario& s) {
  const ScoringParams& p = s.config.scoring;
  const double avg = p.population_average_income.value_or(s.population.average_income());
  std::vector<double> out;
  out.reserve(s.population.agents.size());
  for (const Agent& a : s.population.agents) out.push_back(marginal_utility_of_money(p.beta_m, avg, a.income));
  return out;
}

void score_population(Population& pop, const EventLog& log, const ScoringParams& p,
                      const std::vector<double>& beta_m) {
  const auto executed = collect_executions(log);
  std::size_t e = 0;
  for (std::size_t i = 0; i < pop.agents.size(); ++i) {
    Agent& a = pop.agents[i];
    while (e < executed.size() && executed[e].agent < a.id) ++e;
    const ExecutedPlan* ex = e < executed.size() && executed[e].agent == a.id ? &executed[e] : nullptr;
    a.selected_plan().score = score_plan(a.selected_plan(), ex, p, beta_m[i]).total;
  }
}

namespace {

enum class Strategy { select, reroute, time_mutate, mode_change };

Strategy draw_strategy(const StrategyConfig& s, bool innovate, Rng& rng) {
  if (!innovate) return Strategy::select;
  const double total = s.w_select + s.w_reroute + s.w_time_mutate + s.w_mode_change;
  double u = rng.uniform() * total;
  if ((u -= s.w_select) < 0.0) return Strategy::select;
  if ((u -= s.w_reroute) < 0.0) return Strategy::reroute;
  if ((u -= s.w_time_mutate) < 0.0) return Strategy::time_mutate;
  return Strategy::mode_change;
}

void replan_agent(Agent& a, const Config& cfg, bool innovate, const Router& router, double beta_m_n,
                  std::uint64_t seed) {
  const StrategyConfig& s = cfg.strategy;
  Rng rng(seed);
  Strategy strategy = draw_strategy(s, innovate, rng);
  const Plan& current = a.selected_plan();
  const auto modes = available_modes(a);
  if (strategy == Strategy::mode_change && modes.size() < 2) strategy = Strategy::select;

  if (strategy == Strategy::select) {
    a.selected = select_plan(a, s.temperature, rng);
    return;
  }
  Plan next;
  switch (strategy) {
    case Strategy::reroute: next = reroute(current, router, cfg.scoring, beta_m_n); break;
    case Strategy::time_mutate: next = mutate_times(current, s.mutation_range_s, rng); break;
    case Strategy::mode_change: next = change_mode(current, modes, router, cfg.scoring, beta_m_n, rng); break;
    case Strategy::select: break;
  }
  a.plans.push_back(std::move(next));
  a.selected = a.plans.size() - 1;
  trim_memory(a, s.memory_max);
}

IterationStats summarize(int iteration, const Population& pop, const EventLog& log, const VehicleDelays& delays) {
  IterationStats st;
  st.iteration = iteration;
  double sum = 0.0, best = 0.0, worst = 0.0;
  int n = 0;
  for (const Agent& a : pop.agents) {
    if (a.kind != AgentKind::person) continue;
    double hi = -INFINITY, lo = INFINITY;
    for (const Plan& p : a.plans) {
      if (!p.score) continue;
      hi = std::max(hi, *p.score);
      lo = std::min(lo, *p.score);
    }
    sum += a.selected_plan().score.value_or(0.0);
    best += hi;
    worst += lo;
    ++n;
  }
  if (n > 0) {
    st.mean_score = sum / n;
    st.mean_best = best / n;
    st.mean_worst = worst / n;
  }
  for (const Event& e : log) {
    if (e.kind == EventKind::leg_depart && e.mode == Mode::car) ++st.car_trips;
    if (e.kind == EventKind::money) st.toll_revenue -= e.amount;
  }
  double d = 0.0;
  for (const auto& [key, list] : delays) {
    for (double x : list) d += x;
  }
  st.delay_hours = d / 3600.0;
  return st;
}

}  // namespace

RunResult run_loop(Scenario scenario, const RunOptions& options) {
  const Config& cfg = scenario.config;
  const int n = cfg.scenario.iterations;
  const auto beta_m = agent_beta_m(scenario);
  const bool toll = cfg.scenario.toll_enabled;
  const fs::path& out = options.output_dir;
  if (!out.empty() && toll && options.write_toll_history) fs::create_directories(out / "tolls");

  RunResult result;
  TollSchedule tolls(cfg.tolling.interval_s);
  if (toll && !options.initial_tolls.empty()) {
    if (options.initial_tolls.interval_s() != cfg.tolling.interval_s)
      throw Error("initial toll schedule uses a different interval length");
    tolls = options.initial_tolls;
  }
  MobsimResult sim;
  for (int k = 1; k <= n; ++k) {
    const int iteration = options.first_iteration + k - 1;
    sim = run_mobsim(scenario, tolls);
    const VehicleDelays delays = measure_delay_events(sim.events, scenario.network, cfg.tolling.interval_s);
    TollSchedule next(cfg.tolling.interval_s);
    if (toll) {
      next = update_tolls(DelayTable::from_vehicle_delays(delays, cfg.tolling.interval_s), cfg.tolling, &tolls);
      if (!out.empty() && options.write_toll_history)
        write_toll_schedule(out / "tolls" / ("iteration_" + std::to_string(iteration) + ".csv"), tolls);
    }
    score_population(scenario.population, sim.events, cfg.scoring, beta_m);
    IterationStats st = summarize(iteration, scenario.population, sim.events, delays);
    st.forced_moves = sim.forced_moves;
    result.stats.push_back(st);

    if (k == n) {
      result.tolls = tolls;
      result.next_tolls = next;
      break;
    }
    const bool innovate = innovation_active(k, n, cfg.scenario.innovation_fraction);
    const Router router(scenario.network, sim.travel_times, next);
    for (std::size_t i = 0; i < scenario.population.agents.size(); ++i) {
      Agent& a = scenario.population.agents[i];
      if (a.kind == AgentKind::freight) continue;
      replan_agent(a, cfg, innovate, router, beta_m[i],
                   stream_seed(cfg.scenario.rng_seed, a.id, static_cast<std::uint64_t>(iteration)));
    }
    tolls = std::move(next);
  }
  result.events = std::move(sim.events);
  result.scenario = std::move(scenario);
  if (!out.empty()) {
    fs::create_directories(out);
    write_events(out / "events.csv", result.events);
    write_iteration_stats(out / "iterations.csv", result.stats);
    write_score_stats(out / "scorestats.csv", result.stats);
    if (toll) {
      write_toll_schedule(out / "tolls.csv", result.tolls);
      write_toll_schedule(out / "next_tolls.csv", result.next_tolls);
    }
  }
  return result;
}

void write_iteration_stats(const fs::path& path, const std::vector<IterationStats>& stats) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << "iteration,mean_score,car_trips,delay_hours,toll_revenue,forced_moves\n";
  for (const auto& s : stats) {
    f << s.iteration << ',' << csv::fmt(s.mean_score) << ',' << s.car_trips << ',' << csv::fmt(s.delay_hours) << ','
      << csv::fmt(s.toll_revenue) << ',' << s.forced_moves << '\n';
  }
}

void write_score_stats(const fs::path& path, const std::vector<IterationStats>& stats) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << "iteration,mean_executed,mean_best,mean_worst\n";
  for (const auto& s : stats) {
    f << s.iteration << ',' << csv::fmt(s.mean_score) << ',' << csv::fmt(s.mean_best) << ','
      << csv::fmt(s.mean_worst) << '\n';
  }
}

std::vector<IterationStats> read_iteration_stats(const fs::path& path) {
  std::ifstream f(path);
  const std::string file = path.filename().string();
  if (!f) throw ValidationError(file, "document", "file", "missing file " + path.string());
  std::string line;
  std::getline(f, line);
  std::vector<IterationStats> out;
  std::size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    const auto c = csv::split(line);
    const std::string r = "row " + std::to_string(row);
    if (c.size() != 6) throw ValidationError(file, r, "columns", "expected 6 columns");
    IterationStats s;
    s.iteration = csv::parse<int>(c[0], file, r, "iteration");
    s.mean_score = csv::parse<double>(c[1], file, r, "mean_score");
    s.car_trips = csv::parse<int>(c[2], file, r, "car_trips");
    s.delay_hours = csv::parse<double>(c[3], file, r, "delay_hours");
    s.toll_revenue = csv::parse<double>(c[4], file, r, "toll_revenue");
    s.forced_moves = csv::parse<int>(c[5], file, r, "forced_moves");
    out.push_back(s);
  }
  return out;
}

}  // namespace tollsim
