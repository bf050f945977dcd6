#include "tollsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "tollsim/controller.hpp"
#include "tollsim/csv.hpp"
#include "tollsim/error.hpp"
#include "tollsim/manifest.hpp"
#include "tollsim/mobsim.hpp"

namespace tollsim::analysis {

namespace fs = std::filesystem;

double upscale(double daily, double sample_factor, double days) { return daily * sample_factor * days; }

Kpis traffic_kpis(const EventLog& log, const Network& net, int interval_s) {
  Kpis k;
  double car_toll = 0.0;
  for (const ExecutedPlan& p : collect_executions(log)) {
    for (const ExecutedLeg& leg : p.legs) {
      if (leg.mode != Mode::car) continue;
      k.car_trips += 1.0;
      k.car_km += leg.distance / 1000.0;
      car_toll += -leg.money;
      k.max_toll_per_trip = std::max(k.max_toll_per_trip, -leg.money);
    }
  }
  for (const Event& e : log) {
    if (e.kind == EventKind::money) k.toll_revenue -= e.amount;
  }
  double delay = 0.0;
  for (const auto& [key, list] : measure_delay_events(log, net, interval_s)) {
    for (double d : list) delay += d;
  }
  k.delay_hours = delay / 3600.0;
  if (k.car_trips > 0.0) {
    k.avg_toll_per_trip = car_toll / k.car_trips;
    k.avg_km_per_trip = k.car_km / k.car_trips;
  }
  if (k.car_km > 0.0) k.avg_toll_per_km = car_toll / k.car_km;
  return k;
}

Kpis annualize(const Kpis& d, double sample_factor, double days, double cpi_factor) {
  Kpis a = d;
  a.toll_revenue = upscale(d.toll_revenue, sample_factor, days) * cpi_factor;
  a.delay_hours = upscale(d.delay_hours, sample_factor, days);
  a.car_trips = upscale(d.car_trips, sample_factor, days);
  a.car_km = upscale(d.car_km, sample_factor, days);
  return a;
}

Delta delta(double reference, double policy) {
  Delta d{reference, policy, policy - reference, 0.0};
  if (reference != 0.0) d.percent = 100.0 * (policy - reference) / reference;
  return d;
}

std::vector<KpiRow> compare_kpis(const Kpis& ref, const Kpis& policy, double sample_factor, double days,
                                 double cpi_factor) {
  const Kpis ra = annualize(ref, sample_factor, days, cpi_factor);
  const Kpis pa = annualize(policy, sample_factor, days, cpi_factor);
  std::vector<KpiRow> rows;
  auto add = [&](std::string name, double Kpis::*field) {
    rows.push_back(KpiRow{std::move(name), delta(ref.*field, policy.*field), delta(ra.*field, pa.*field)});
  };
  add("avg_toll_per_trip", &Kpis::avg_toll_per_trip);
  add("max_toll_per_trip", &Kpis::max_toll_per_trip);
  add("avg_toll_per_km", &Kpis::avg_toll_per_km);
  add("toll_revenue", &Kpis::toll_revenue);
  add("car_delay_hours", &Kpis::delay_hours);
  add("car_trips", &Kpis::car_trips);
  add("car_km", &Kpis::car_km);
  add("avg_km_per_trip", &Kpis::avg_km_per_trip);
  return rows;
}

namespace {
constexpr std::array<std::string_view, kTransitionCount> kTransitionNames = {"car2car", "car2pt", "pt2car", "pt2pt",
                                                                             "other"};
}

std::string_view to_string(Transition t) noexcept { return kTransitionNames[static_cast<std::size_t>(t)]; }

Transition classify(Mode ref, Mode policy) noexcept {
  if (ref == Mode::car && policy == Mode::car) return Transition::car2car;
  if (ref == Mode::car && policy == Mode::pt) return Transition::car2pt;
  if (ref == Mode::pt && policy == Mode::car) return Transition::pt2car;
  if (ref == Mode::pt && policy == Mode::pt) return Transition::pt2pt;
  return Transition::other;
}

double ShiftReport::shift_share(Transition t) const {
  const auto i = static_cast<std::size_t>(t);
  return trips[i] > 0 ? static_cast<double>(departure_shifted[i]) / trips[i] : 0.0;
}

ShiftReport behavioral_shift(const std::vector<ExecutedPlan>& ref, const std::vector<ExecutedPlan>& policy,
                             double threshold_s) {
  ShiftReport r;
  std::map<AgentId, const ExecutedPlan*> by_id;
  for (const ExecutedPlan& p : policy) by_id[p.agent] = &p;
  std::set<AgentId> seen;
  for (const ExecutedPlan& a : ref) {
    auto it = by_id.find(a.agent);
    seen.insert(a.agent);
    if (it == by_id.end() || it->second->legs.size() != a.legs.size()) {
      ++r.unmatched_agents;
      continue;
    }
    const ExecutedPlan& b = *it->second;
    for (std::size_t i = 0; i < a.legs.size(); ++i) {
      const Transition t = classify(a.legs[i].mode, b.legs[i].mode);
      const auto k = static_cast<std::size_t>(t);
      r.trips[k] += 1;
      r.km[k] += a.legs[i].distance / 1000.0;
      if (std::abs(b.legs[i].departure - a.legs[i].departure) > threshold_s) {
        r.departure_shifted[k] += 1;
        r.departure_shifted_km[k] += a.legs[i].distance / 1000.0;
      }
      if (t == Transition::car2pt) r.km_car_to_pt += a.legs[i].distance / 1000.0;
    }
  }
  for (const ExecutedPlan& p : policy) {
    if (!seen.contains(p.agent)) ++r.unmatched_agents;
  }
  return r;
}

double emissions_delta_t(double car_km_delta, double delay_hours_delta, double ef_km_g, double ef_hour_kg) {
  return car_km_delta * ef_km_g / 1e6 + delay_hours_delta * ef_hour_kg / 1e3;
}

WelfareReport welfare(double revenue, const std::vector<double>& utility_change, const std::vector<double>& beta_m) {
  if (utility_change.size() != beta_m.size()) throw Error("welfare: utility changes and betas differ in length");
  WelfareReport w;
  w.revenue = revenue;
  for (std::size_t i = 0; i < utility_change.size(); ++i) {
    if (!(beta_m[i] > 0.0)) throw Error("welfare: marginal utility of money must be > 0");
    w.utility_change_money += utility_change[i] / beta_m[i];
  }
  w.net = w.revenue + w.utility_change_money;
  return w;
}

std::vector<DecileRow> vertical_distribution(const std::vector<AgentOutcome>& agents) {
  const std::size_t n = agents.size();
  if (n < 10) throw Error("income deciles need at least 10 agents, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (agents[a].income != agents[b].income) return agents[a].income > agents[b].income;
    return agents[a].id < agents[b].id;
  });
  double revenue = 0.0;
  for (const AgentOutcome& a : agents) revenue += a.toll;
  std::vector<DecileRow> rows;
  for (std::size_t d = 0; d < 10; ++d) {
    const std::size_t lo = d * n / 10, hi = (d + 1) * n / 10;
    DecileRow r;
    r.decile = static_cast<int>(d + 1);
    r.agents = static_cast<int>(hi - lo);
    r.max_income = agents[order[lo]].income;
    r.min_income = agents[order[hi - 1]].income;
    double utils = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const AgentOutcome& a = agents[order[k]];
      r.total_toll += a.toll;
      utils += a.toll * a.beta_m;
      r.total_utility_change += a.utility_change;
    }
    r.mean_toll = r.total_toll / r.agents;
    r.mean_toll_utils = utils / r.agents;
    r.mean_utility_change = r.total_utility_change / r.agents;
    r.revenue_share = revenue > 0.0 ? r.total_toll / revenue : 0.0;
    rows.push_back(r);
  }
  return rows;
}

std::vector<ZoneRow> horizontal_distribution(const std::vector<AgentOutcome>& agents, const Zones& zones) {
  std::map<ZoneId, ZoneRow> rows;
  for (const Zone& z : zones.all()) rows[z.id] = ZoneRow{z.id, z.classification};
  for (const AgentOutcome& a : agents) {
    auto it = rows.find(a.zone);
    if (it == rows.end())
      throw Error("agent " + std::to_string(a.id) + " lives in unknown zone " + std::to_string(a.zone));
    ZoneRow& r = it->second;
    r.population += 1;
    r.total_toll += a.toll;
    r.total_utility_change += a.utility_change;
  }
  std::vector<ZoneRow> out;
  for (auto& [id, r] : rows) {
    if (r.population > 0) {
      r.mean_toll = r.total_toll / r.population;
      r.mean_utility_change = r.total_utility_change / r.population;
    }
    out.push_back(r);
  }
  return out;
}

RunData load_run(const fs::path& dir) {
  RunData r;
  r.dir = dir;
  r.manifest = read_manifest(dir);
  r.scenario = load_scenario(dir / "scenario");
  r.events = read_events(dir / "events.csv");
  return r;
}

namespace {

void require_same_population(const RunData& ref, const RunData& policy) {
  const std::string a = population_hash(ref.scenario.population);
  const std::string b = population_hash(policy.scenario.population);
  if (a != b)
    throw Error("populations differ: " + ref.dir.string() + " has " + a + ", " + policy.dir.string() + " has " + b);
}

std::map<AgentId, double> tolls_paid(const EventLog& log) {
  std::map<AgentId, double> out;
  for (const Event& e : log) {
    if (e.kind == EventKind::money) out[e.agent] -= e.amount;
  }
  return out;
}

}  // namespace

std::vector<AgentOutcome> agent_outcomes(const RunData& ref, const RunData& policy) {
  require_same_population(ref, policy);
  const auto beta = agent_beta_m(policy.scenario);
  const auto paid = tolls_paid(policy.events);
  const auto& ra = ref.scenario.population.agents;
  const auto& pa = policy.scenario.population.agents;
  std::vector<AgentOutcome> out;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const Agent& a = pa[i];
    if (a.kind != AgentKind::person) continue;
    const auto& rs = ra[i].selected_plan().score;
    const auto& ps = a.selected_plan().score;
    if (!rs || !ps) throw Error("agent " + std::to_string(a.id) + " is unscored");
    AgentOutcome o;
    o.id = a.id;
    o.income = a.income;
    o.zone = a.home_zone;
    auto it = paid.find(a.id);
    o.toll = it == paid.end() ? 0.0 : it->second;
    o.beta_m = beta[i];
    o.utility_change = *ps - *rs;
    out.push_back(o);
  }
  return out;
}

Comparison compare_runs(const RunData& ref, const RunData& policy) {
  require_same_population(ref, policy);
  const Config& cfg = policy.scenario.config;
  const int interval = cfg.tolling.interval_s;
  const double factor = 1.0 / cfg.scenario.sample_scale;
  const double days = cfg.analysis.days_per_year;
  const double cpi = cfg.analysis.monetary_cpi_factor;

  Comparison c;
  c.ref_daily = traffic_kpis(ref.events, ref.scenario.network, interval);
  c.policy_daily = traffic_kpis(policy.events, policy.scenario.network, interval);
  c.kpis = compare_kpis(c.ref_daily, c.policy_daily, factor, days, cpi);
  c.shifts = behavioral_shift(collect_executions(ref.events), collect_executions(policy.events),
                              cfg.analysis.departure_shift_threshold_s);
  const double km = upscale(c.policy_daily.car_km - c.ref_daily.car_km, factor, days);
  const double hours = upscale(c.policy_daily.delay_hours - c.ref_daily.delay_hours, factor, days);
  c.co2_km_t = emissions_delta_t(km, 0.0, cfg.analysis.ef_km_g, cfg.analysis.ef_hour_kg);
  c.co2_delay_t = emissions_delta_t(0.0, hours, cfg.analysis.ef_km_g, cfg.analysis.ef_hour_kg);

  const auto beta = agent_beta_m(policy.scenario);
  std::vector<double> du;
  const auto& ra = ref.scenario.population.agents;
  const auto& pa = policy.scenario.population.agents;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const auto& rs = ra[i].selected_plan().score;
    const auto& ps = pa[i].selected_plan().score;
    if (!rs || !ps) throw Error("agent " + std::to_string(pa[i].id) + " is unscored");
    du.push_back(*ps - *rs);
  }
  c.welfare_daily = welfare(c.policy_daily.toll_revenue - c.ref_daily.toll_revenue, du, beta);
  const double scale = factor * days * cpi;
  c.welfare_annual = WelfareReport{c.welfare_daily.revenue * scale, c.welfare_daily.utility_change_money * scale,
                                   c.welfare_daily.net * scale};

  const auto outcomes = agent_outcomes(ref, policy);
  c.deciles = vertical_distribution(outcomes);
  c.zones = horizontal_distribution(outcomes, policy.scenario.zones);
  return c;
}

void write_reports(const fs::path& dir, const Comparison& c) {
  fs::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    return f;
  };
  using csv::fmt;
  {
    auto f = open("kpis.csv");
    f << "indicator,reference_daily,policy_daily,change_daily,percent,reference_annual,policy_annual,change_annual\n";
    for (const KpiRow& r : c.kpis) {
      f << r.indicator << ',' << fmt(r.daily.reference) << ',' << fmt(r.daily.policy) << ',' << fmt(r.daily.change)
        << ',' << fmt(r.daily.percent) << ',' << fmt(r.annual.reference) << ',' << fmt(r.annual.policy) << ','
        << fmt(r.annual.change) << '\n';
    }
    f << "co2_from_car_km_t,,,,,,," << fmt(c.co2_km_t) << '\n';
    f << "co2_from_delay_t,,,,,,," << fmt(c.co2_delay_t) << '\n';
  }
  {
    auto f = open("shifts.csv");
    f << "transition,trips,departure_shifted,departure_shift_share,km,departure_shifted_km\n";
    for (std::size_t i = 0; i < kTransitionCount; ++i) {
      const auto t = static_cast<Transition>(i);
      f << to_string(t) << ',' << c.shifts.trips[i] << ',' << c.shifts.departure_shifted[i] << ','
        << fmt(c.shifts.shift_share(t)) << ',' << fmt(c.shifts.km[i]) << ',' << fmt(c.shifts.departure_shifted_km[i])
        << '\n';
    }
    f << "km_car_to_pt,,,," << fmt(c.shifts.km_car_to_pt) << ",\n";
    f << "unmatched_agents," << c.shifts.unmatched_agents << ",,,,\n";
  }
  {
    auto f = open("deciles.csv");
    f << "decile,agents,min_income,max_income,total_toll,mean_toll,mean_toll_utils,total_utility_change,"
         "mean_utility_change,revenue_share\n";
    for (const DecileRow& r : c.deciles) {
      f << r.decile << ',' << r.agents << ',' << fmt(r.min_income) << ',' << fmt(r.max_income) << ','
        << fmt(r.total_toll) << ',' << fmt(r.mean_toll) << ',' << fmt(r.mean_toll_utils) << ','
        << fmt(r.total_utility_change) << ',' << fmt(r.mean_utility_change) << ',' << fmt(r.revenue_share) << '\n';
    }
  }
  {
    auto f = open("zones.csv");
    f << "zone,classification,population,total_toll,total_utility_change,mean_toll,mean_utility_change\n";
    for (const ZoneRow& r : c.zones) {
      f << r.zone << ',' << (r.classification == ZoneClass::inner ? "inner" : "outer") << ',' << r.population << ','
        << fmt(r.total_toll) << ',' << fmt(r.total_utility_change) << ',' << fmt(r.mean_toll) << ','
        << fmt(r.mean_utility_change) << '\n';
    }
  }
  {
    auto f = open("welfare.csv");
    f << "period,toll_revenue,utility_change_money,net_welfare\n";
    f << "daily," << fmt(c.welfare_daily.revenue) << ',' << fmt(c.welfare_daily.utility_change_money) << ','
      << fmt(c.welfare_daily.net) << '\n';
    f << "annual," << fmt(c.welfare_annual.revenue) << ',' << fmt(c.welfare_annual.utility_change_money) << ','
      << fmt(c.welfare_annual.net) << '\n';
  }
}

}  // namespace tollsim::analysis
