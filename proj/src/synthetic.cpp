#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "tollsim/error.hpp"
#include "tollsim/mobsim.hpp"
#include "tollsim/rng.hpp"
#include "tollsim/router.hpp"
#include "tollsim/scenario.hpp"

namespace tollsim {

Json synth_spec_to_json(const SynthSpec& s) {
  return Json{{"schema_version", kScenarioSchemaVersion},
              {"layout", s.layout == SynthLayout::corridor ? "corridor" : "radial"},
              {"agents", s.agents},
              {"income_median", s.income_median},
              {"income_sigma", s.income_sigma},
              {"car_base", s.car_base},
              {"car_income_slope", s.car_income_slope},
              {"initial_car_share", s.initial_car_share},
              {"inner_car_factor", s.inner_car_factor},
              {"shop_share", s.shop_share},
              {"freight_share", s.freight_share},
              {"rings", s.rings},
              {"sectors", s.sectors},
              {"work_start_mean_s", s.work_start_mean_s},
              {"work_start_spread_s", s.work_start_spread_s},
              {"work_window_s", s.work_window_s}};
}

namespace {

template <typename T>
void read_key(const Json& j, const char* key, T& out, const std::string& file) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ValidationError(file, "spec", key, std::string("wrong type: ") + e.what());
  }
}

void check_spec(const SynthSpec& s, const std::string& f = "spec.json") {
  if (s.agents <= 0) throw ValidationError(f, "spec", "agents", "must be > 0");
  if (!(s.income_median > 0.0)) throw ValidationError(f, "spec", "income_median", "must be > 0");
  if (!(s.income_sigma >= 0.0)) throw ValidationError(f, "spec", "income_sigma", "must be >= 0");
  for (auto [v, name] : {std::pair{s.initial_car_share, "initial_car_share"}, std::pair{s.shop_share, "shop_share"},
                         std::pair{s.freight_share, "freight_share"}, std::pair{s.inner_car_factor, "inner_car_factor"}}) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(f, "spec", name, "must be in [0, 1]");
  }
  if (s.layout == SynthLayout::radial) {
    if (s.rings < 1) throw ValidationError(f, "spec", "rings", "must be >= 1");
    if (s.sectors < 3) throw ValidationError(f, "spec", "sectors", "must be >= 3");
  }
  if (s.work_start_spread_s < 0) throw ValidationError(f, "spec", "work_start_spread_s", "must be >= 0");
  if (s.work_window_s < 0) throw ValidationError(f, "spec", "work_window_s", "must be >= 0");
}

}  // namespace

SynthSpec synth_spec_from_json(const Json& j, const std::string& file) {
  if (!j.is_object()) throw ValidationError(file, "spec", "document", "expected an object");
  SynthSpec s;
  std::string layout = "corridor";
  read_key(j, "layout", layout, file);
  if (layout == "corridor") {
    s.layout = SynthLayout::corridor;
  } else if (layout == "radial") {
    s.layout = SynthLayout::radial;
  } else {
    throw ValidationError(file, "spec", "layout", "expected corridor or radial");
  }
  read_key(j, "agents", s.agents, file);
  read_key(j, "income_median", s.income_median, file);
  read_key(j, "income_sigma", s.income_sigma, file);
  read_key(j, "car_base", s.car_base, file);
  read_key(j, "car_income_slope", s.car_income_slope, file);
  read_key(j, "initial_car_share", s.initial_car_share, file);
  read_key(j, "inner_car_factor", s.inner_car_factor, file);
  read_key(j, "shop_share", s.shop_share, file);
  read_key(j, "freight_share", s.freight_share, file);
  read_key(j, "rings", s.rings, file);
  read_key(j, "sectors", s.sectors, file);
  read_key(j, "work_start_mean_s", s.work_start_mean_s, file);
  read_key(j, "work_start_spread_s", s.work_start_spread_s, file);
  read_key(j, "work_window_s", s.work_window_s, file);
  check_spec(s, file);
  return s;
}

namespace {

struct Builder {
  std::vector<Node> nodes;
  std::vector<Link> links;

  void node(NodeId id, double x, double y) { nodes.push_back(Node{id, x, y}); }

  void link(LinkId id, NodeId from, NodeId to, double speed, double capacity, int lanes = 1,
            double length = 0.0) {
    if (length <= 0.0) {
      const Node& a = find(from);
      const Node& b = find(to);
      length = std::max(1.0, std::round(std::hypot(a.x - b.x, a.y - b.y)));
    }
    Link l;
    l.id = id;
    l.from = from;
    l.to = to;
    l.length = length;
    l.free_speed = speed;
    l.flow_capacity = capacity;
    l.lanes = lanes;
    links.push_back(l);
  }

  const Node& find(NodeId id) const {
    for (const Node& n : nodes) {
      if (n.id == id) return n;
    }
    throw Error("synthetic network: unknown node " + std::to_string(id));
  }
};

/// Where a person lives and works; the link leaving home is implied by the route.
struct Anchors {
  LinkId home;
  LinkId work;
  LinkId shop;
  ZoneId zone;
};

/// Income-sorted ranks for stratified attribute assignment: rank / n in [0, 1).
std::vector<double> income_percentiles(const std::vector<double>& incomes) {
  std::vector<std::size_t> order(incomes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return incomes[a] < incomes[b]; });
  std::vector<double> pct(incomes.size());
  for (std::size_t r = 0; r < order.size(); ++r) pct[order[r]] = (r + 0.5) / static_cast<double>(order.size());
  return pct;
}

constexpr double kHourS = 3600.0;

int clamp_day(double t) { return std::clamp(static_cast<int>(std::lround(t)), 0, kDaySeconds - 1); }

double leg_time(const Network& net, const Router& router, LinkId from, LinkId to, Mode mode, const MobsimParams& mp,
                std::vector<LinkId>* route) {
  if (is_teleported(mode)) return teleport_leg(mode, beeline(net, from, to), mp);
  *route = router.route(from, to, 0.0, mode, CostWeights{});
  double t = 0.0;
  for (LinkId l : *route) t += net.link(l).free_flow_time();
  return t;
}

Plan person_plan(const Network& net, const Router& router, const MobsimParams& mp, const Anchors& a, Mode mode,
                 bool shop, double work_start, int window_s) {
  Plan p;
  const double work_dur = 8.0 * kHourS;
  Activity home{"home", a.home, 0.0, 0, std::nullopt, std::nullopt, std::nullopt};
  const int start = clamp_day(work_start);
  Activity work{"work", a.work, work_dur, 0, std::max(0, start - window_s), start, std::nullopt};

  Leg to_work{mode, {}, 0, std::nullopt};
  const double t1 = leg_time(net, router, a.home, a.work, mode, mp, &to_work.route);
  home.end_time = clamp_day(work_start - t1 - 300.0);
  to_work.departure_time = home.end_time;
  work.end_time = clamp_day(work_start + work_dur);

  p.activities.push_back(home);
  p.legs.push_back(to_work);
  p.activities.push_back(work);
  LinkId last = a.work;
  int last_end = work.end_time;
  double away = work_dur + t1 + 300.0;
  if (shop) {
    Leg to_shop{mode, {}, last_end, std::nullopt};
    const double t2 = leg_time(net, router, last, a.shop, mode, mp, &to_shop.route);
    Activity s{"shop", a.shop, kHourS, clamp_day(last_end + t2 + kHourS), std::nullopt, std::nullopt, std::nullopt};
    p.legs.push_back(to_shop);
    p.activities.push_back(s);
    last = a.shop;
    last_end = s.end_time;
    away += t2 + kHourS;
  }
  Leg back{mode, {}, last_end, std::nullopt};
  away += leg_time(net, router, last, a.home, mode, mp, &back.route);
  p.legs.push_back(back);
  // home gets whatever the day leaves, so the initial schedule sits at the duration optimum
  p.activities.front().typical_duration = std::max(kHourS, kDaySeconds - away);
  Activity home2 = p.activities.front();
  home2.end_time = kDaySeconds - 1;
  p.activities.push_back(home2);
  return p;
}

Plan freight_plan(const Network& net, const Router& router, LinkId depot, LinkId stop, double start) {
  Plan p;
  Activity d{"depot", depot, 10.0 * kHourS, clamp_day(start), std::nullopt, std::nullopt, std::nullopt};
  Leg out{Mode::freight, router.route(depot, stop, start, Mode::freight, CostWeights{}), d.end_time, std::nullopt};
  Activity s{"delivery", stop, 0.5 * kHourS, clamp_day(start + 2.0 * kHourS), std::nullopt, std::nullopt,
             std::nullopt};
  Leg back{Mode::freight, router.route(stop, depot, s.end_time, Mode::freight, CostWeights{}), s.end_time,
           std::nullopt};
  Activity d2 = d;
  d2.end_time = kDaySeconds - 1;
  p.activities = {d, s, d2};
  p.legs = {out, back};
  (void)net;
  return p;
}

// --- corridor -----------------------------------------------------------------------------
//
// Home areas west of junction A, workplaces east of junction B. Between them a main road
// A->B and a slower detour A->D->B; traffic returns on a wide road B->A.

constexpr int kCorridorHomes = 5;
constexpr int kCorridorWorks = 3;

struct Layout {
  Network net;
  Zones zones;
  std::vector<Anchors> homes;  // one per home area, work/shop unset
  std::vector<LinkId> works;
  std::vector<LinkId> shops;   // parallel to homes
  std::vector<double> home_weights;
  LinkId freight_stop = 0;
};

Layout corridor_layout() {
  Builder b;
  b.node(1, 0, 0);
  b.node(2, 5000, 0);
  b.node(3, 2500, 2000);
  b.node(30, -800, -2600);
  for (int i = 0; i < kCorridorHomes; ++i) b.node(10 + i, -2000, (i - 2) * 1000.0);
  for (int j = 0; j < kCorridorWorks; ++j) b.node(20 + j, 6000, (j - 1) * 1000.0);

  b.link(1, 1, 2, 13.9, 1200.0);  // main road, the bottleneck
  b.link(2, 1, 3, 13.9, 700.0);   // detour
  b.link(3, 3, 2, 13.9, 700.0);
  b.link(4, 2, 1, 16.7, 4000.0, 2);
  for (int i = 0; i < kCorridorHomes; ++i) {
    b.link(100 + i, 10 + i, 1, 13.9, 3000.0, 2);
    b.link(110 + i, 1, 10 + i, 13.9, 3000.0, 2);
  }
  for (int j = 0; j < kCorridorWorks; ++j) {
    b.link(200 + j, 2, 20 + j, 13.9, 3000.0, 2);
    b.link(210 + j, 20 + j, 2, 13.9, 3000.0, 2);
  }
  b.link(300, 1, 30, 13.9, 3000.0, 2);
  b.link(301, 30, 1, 13.9, 3000.0, 2);

  Layout L;
  L.net = Network(b.nodes, b.links);
  std::vector<Zone> zones;
  Zone core{0, ZoneClass::inner, {}};
  for (const Link& l : b.links) {
    if (l.id < 100 || l.id >= 120) core.links.push_back(l.id);
  }
  zones.push_back(core);
  for (int i = 0; i < kCorridorHomes; ++i) {
    zones.push_back(Zone{i + 1, ZoneClass::outer, {static_cast<LinkId>(100 + i), static_cast<LinkId>(110 + i)}});
    L.homes.push_back(Anchors{static_cast<LinkId>(110 + i), 0, 300, i + 1});
    L.home_weights.push_back(1.0);
  }
  L.zones = Zones(zones);
  for (int j = 0; j < kCorridorWorks; ++j) L.works.push_back(static_cast<LinkId>(200 + j));
  L.freight_stop = 200;
  return L;
}

// --- radial -------------------------------------------------------------------------------
//
// A center node surrounded by rings of nodes every 2 km. Radial spokes in both directions
// and ring roads in both directions. Every ring node has a residential stub; the center
// has workplace stubs.

LinkId rid(int base, int ring, int sector) { return static_cast<LinkId>(base + ring * 100 + sector); }
NodeId rnode(int ring, int sector) { return ring == 0 ? 0 : static_cast<NodeId>(ring * 100 + sector); }

Layout radial_layout(int rings, int sectors) {
  Builder b;
  constexpr double kRing = 2000.0;
  b.node(0, 0, 0);
  for (int r = 1; r <= rings; ++r) {
    for (int s = 0; s < sectors; ++s) {
      const double ang = 2.0 * std::numbers::pi * s / sectors;
      b.node(rnode(r, s), kRing * r * std::cos(ang), kRing * r * std::sin(ang));
      b.node(10000 + rnode(r, s), (kRing * r + 600) * std::cos(ang + 0.15), (kRing * r + 600) * std::sin(ang + 0.15));
    }
  }
  constexpr int kWorks = 4;
  for (int k = 0; k < kWorks; ++k) {
    const double ang = 2.0 * std::numbers::pi * (k + 0.5) / kWorks;
    b.node(9000 + k, 500 * std::cos(ang), 500 * std::sin(ang));
  }
  for (int r = 1; r <= rings; ++r) {
    // inbound spokes carry everyone living further out, the innermost is the bottleneck
    const double inbound = r == 1 ? 240.0 : r == 2 ? 260.0 : 280.0;
    for (int s = 0; s < sectors; ++s) {
      b.link(rid(10000, r, s), rnode(r, s), rnode(r - 1, s), 13.9, inbound);
      b.link(rid(20000, r, s), rnode(r - 1, s), rnode(r, s), 13.9, 2500.0, 2);
      b.link(rid(30000, r, s), rnode(r, s), rnode(r, (s + 1) % sectors), 11.1, 600.0);
      b.link(rid(40000, r, s), rnode(r, (s + 1) % sectors), rnode(r, s), 11.1, 600.0);
      b.link(rid(50000, r, s), 10000 + rnode(r, s), rnode(r, s), 11.1, 3000.0, 2);
      b.link(rid(60000, r, s), rnode(r, s), 10000 + rnode(r, s), 11.1, 3000.0, 2);
    }
  }
  for (int k = 0; k < kWorks; ++k) {
    b.link(static_cast<LinkId>(70000 + k), 0, 9000 + k, 11.1, 4000.0, 2);
    b.link(static_cast<LinkId>(71000 + k), 9000 + k, 0, 11.1, 4000.0, 2);
  }

  Layout L;
  L.net = Network(b.nodes, b.links);
  // zone ring z holds the homes on node ring z + 1; ring 0 is the inner zone and also owns
  // every road link
  const int groups = std::max(1, sectors / 2);
  auto zone_id = [&](int r, int s) -> ZoneId { return r == 1 ? 0 : (r - 1) * 10 + (s * groups) / sectors + 1; };
  std::map<ZoneId, Zone> zones;
  zones[0] = Zone{0, ZoneClass::inner, {}};
  for (const Link& l : b.links) {
    if (l.id >= 50000 && l.id < 70000) continue;
    zones[0].links.push_back(l.id);
  }
  const std::vector<double> ring_share = {0.15, 0.35, 0.50};
  for (int r = 1; r <= rings; ++r) {
    for (int s = 0; s < sectors; ++s) {
      const ZoneId z = zone_id(r, s);
      auto [it, fresh] = zones.try_emplace(z, Zone{z, z == 0 ? ZoneClass::inner : ZoneClass::outer, {}});
      it->second.links.push_back(rid(50000, r, s));
      it->second.links.push_back(rid(60000, r, s));
      L.homes.push_back(Anchors{rid(60000, r, s), 0, 0, z});
      const double share = r - 1 < static_cast<int>(ring_share.size()) ? ring_share[r - 1] : ring_share.back();
      L.home_weights.push_back(share / sectors);
      (void)fresh;
    }
  }
  std::vector<Zone> zv;
  for (auto& [id, z] : zones) zv.push_back(std::move(z));
  L.zones = Zones(zv);
  for (int k = 0; k < kWorks; ++k) L.works.push_back(static_cast<LinkId>(70000 + k));
  L.freight_stop = 70000;
  return L;
}

/// Index drawn from cumulative weights with a quasi-random u in [0, 1).
std::size_t pick_weighted(const std::vector<double>& w, double u) {
  double total = 0.0;
  for (double x : w) total += x;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i] / total;
    if (u < acc) return i;
  }
  return w.size() - 1;
}

}  // namespace

Scenario generate_synthetic(const SynthSpec& spec, std::uint64_t seed) {
  check_spec(spec);
  Layout L = spec.layout == SynthLayout::corridor ? corridor_layout() : radial_layout(spec.rings, spec.sectors);
  Scenario sc;
  sc.network = L.net;
  sc.zones = L.zones;
  const MobsimParams& mp = sc.config.mobsim;
  const TravelTimeTable no_tt;
  const TollSchedule no_tolls;
  const Router router(sc.network, no_tt, no_tolls);

  const int n = spec.agents;
  const int n_freight = static_cast<int>(std::lround(spec.freight_share * n));
  const int n_person = n - n_freight;
  Rng rng(stream_seed(seed, 0x5EED));

  std::vector<double> incomes(static_cast<std::size_t>(n_person));
  for (double& y : incomes) y = std::round(spec.income_median * std::exp(spec.income_sigma * rng.normal()));
  for (double& y : incomes) y = std::max(y, 1.0);
  const auto pct = income_percentiles(incomes);

  // stratify car ownership and home location over the income ranking so that every income
  // decile gets the same spatial mix and a smooth ownership gradient
  std::vector<std::size_t> order(incomes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pct[a] < pct[b]; });
  std::vector<bool> car(incomes.size());
  std::vector<std::size_t> home(incomes.size());
  double acc = rng.uniform();
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double quasi = rng.uniform();
  for (std::size_t i : order) {
    quasi = std::fmod(quasi + golden, 1.0);
    home[i] = pick_weighted(L.home_weights, quasi);
    double p = std::clamp(spec.car_base + spec.car_income_slope * pct[i], 0.0, 1.0);
    if (L.zones.zone(L.homes[home[i]].zone).classification == ZoneClass::inner) p *= spec.inner_car_factor;
    acc += p;
    car[i] = acc >= 1.0;
    if (car[i]) acc -= 1.0;
  }

  for (int i = 0; i < n_person; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    Agent a;
    a.id = static_cast<AgentId>(i + 1);
    a.kind = AgentKind::person;
    a.income = incomes[k];
    a.car_available = car[k];
    Anchors anc = L.homes[home[k]];
    a.home_zone = anc.zone;
    if (spec.layout == SynthLayout::radial && rng.uniform() >= 0.8) {
      // a minority works at another residential stub
      anc.work = L.homes[rng.below(L.homes.size())].home;
      if (anc.work == anc.home) anc.work = L.works[rng.below(L.works.size())];
    } else {
      anc.work = L.works[rng.below(L.works.size())];
    }
    const bool shop = rng.uniform() < spec.shop_share;
    if (spec.layout == SynthLayout::radial) {
      anc.shop = L.homes[rng.below(L.homes.size())].home;
      if (anc.shop == anc.home) anc.shop = L.works[0];
    }
    Mode mode = Mode::pt;
    if (a.car_available && rng.uniform() < spec.initial_car_share) {
      mode = Mode::car;
    } else if (rng.uniform() < 0.2) {
      mode = Mode::bicycle;
    }
    const double start = std::clamp(spec.work_start_mean_s + spec.work_start_spread_s * rng.normal(), 5.0 * kHourS,
                                    11.0 * kHourS);
    a.plans.push_back(person_plan(sc.network, router, mp, anc, mode, shop, std::round(start), spec.work_window_s));
    sc.population.agents.push_back(std::move(a));
  }
  const double avg = sc.population.average_income();
  for (int i = 0; i < n_freight; ++i) {
    Agent a;
    a.id = static_cast<AgentId>(n_person + i + 1);
    a.kind = AgentKind::freight;
    a.income = avg;
    const Anchors& depot = L.homes[rng.below(L.homes.size())];
    a.home_zone = depot.zone;
    a.car_available = false;
    const double start = rng.uniform(6.0 * kHourS, 18.0 * kHourS);
    a.plans.push_back(freight_plan(sc.network, router, depot.home, L.freight_stop, std::round(start)));
    sc.population.agents.push_back(std::move(a));
  }
  validate_scenario(sc);
  return sc;
}

}  // namespace tollsim
