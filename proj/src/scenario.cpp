#include "tollsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tollsim/error.hpp"

namespace tollsim {
namespace fs = std::filesystem;

bool Link::allows(Mode m) const noexcept { return std::find(modes.begin(), modes.end(), m) != modes.end(); }

Network::Network(std::vector<Node> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  std::sort(nodes_.begin(), nodes_.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  std::sort(links_.begin(), links_.end(), [](const Link& a, const Link& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes_.size(); ++i) node_index_.emplace(nodes_[i].id, i);
  for (std::size_t i = 0; i < links_.size(); ++i) link_index_.emplace(links_[i].id, i);
  out_.assign(nodes_.size(), {});
  for (std::size_t i = 0; i < links_.size(); ++i) {
    auto it = node_index_.find(links_[i].from);
    if (it != node_index_.end()) out_[it->second].push_back(i);
  }
}

std::pair<double, double> Network::link_coord(LinkId id) const {
  const Link& l = link(id);
  const Node& a = node(l.from);
  const Node& b = node(l.to);
  return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
}

Zones::Zones(std::vector<Zone> zones) : zones_(std::move(zones)) {
  std::sort(zones_.begin(), zones_.end(), [](const Zone& a, const Zone& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < zones_.size(); ++i) {
    index_.emplace(zones_[i].id, i);
    for (LinkId l : zones_[i].links) link_zone_.emplace(l, zones_[i].id);
  }
}

std::optional<ZoneId> Zones::zone_of_link(LinkId link) const {
  auto it = link_zone_.find(link);
  if (it == link_zone_.end()) return std::nullopt;
  return it->second;
}

const Zone& Zones::zone(ZoneId id) const { return zones_.at(index_.at(id)); }

double Population::average_income() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const Agent& a : agents) {
    if (a.kind != AgentKind::person) continue;
    sum += a.income;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

// --- validation ---------------------------------------------------------------------------

namespace {

std::string rec(const char* kind, std::uint64_t id) { return std::string(kind) + " " + std::to_string(id); }

void check(bool ok, const std::string& file, const std::string& record, const std::string& field,
           const std::string& what) {
  if (!ok) throw ValidationError(file, record, field, what);
}

}  // namespace

void validate_network(const Network& net, const std::string& file) {
  std::set<NodeId> node_ids;
  for (const Node& n : net.nodes()) {
    check(node_ids.insert(n.id).second, file, rec("node", n.id), "id", "duplicate id");
    check(std::isfinite(n.x) && std::isfinite(n.y), file, rec("node", n.id), "x/y", "must be finite");
  }
  std::set<LinkId> link_ids;
  for (const Link& l : net.links()) {
    const std::string r = rec("link", l.id);
    check(link_ids.insert(l.id).second, file, r, "id", "duplicate id");
    check(net.has_node(l.from), file, r, "from", "dangling reference to node " + std::to_string(l.from));
    check(net.has_node(l.to), file, r, "to", "dangling reference to node " + std::to_string(l.to));
    check(l.length > 0.0 && std::isfinite(l.length), file, r, "length", "must be > 0");
    check(l.free_speed > 0.0 && std::isfinite(l.free_speed), file, r, "free_speed", "must be > 0");
    check(l.flow_capacity > 0.0 && std::isfinite(l.flow_capacity), file, r, "flow_capacity",
          "must be finite and > 0");
    check(l.lanes >= 1, file, r, "lanes", "must be >= 1");
    check(!l.modes.empty(), file, r, "modes", "must not be empty");
  }
}

void validate_zones(const Zones& zones, const Network& net, const std::string& file) {
  std::set<ZoneId> ids;
  std::set<LinkId> seen;
  for (const Zone& z : zones.all()) {
    const std::string r = rec("zone", static_cast<std::uint64_t>(z.id));
    check(ids.insert(z.id).second, file, r, "id", "duplicate id");
    for (LinkId l : z.links) {
      check(net.has_link(l), file, r, "links", "dangling reference to link " + std::to_string(l));
      check(seen.insert(l).second, file, r, "links", "link " + std::to_string(l) + " is in more than one zone");
    }
  }
}

void validate_plan(const Plan& plan, const Network& net, const std::string& file, const std::string& record) {
  check(!plan.activities.empty(), file, record, "activities", "plan must start and end with an activity");
  check(plan.activities.size() == plan.legs.size() + 1, file, record, "legs",
        "activities and legs must alternate");
  check(plan.activities.front().type == plan.activities.back().type, file, record, "activities",
        "first and last activity must have the same type");
  for (std::size_t i = 0; i < plan.activities.size(); ++i) {
    const Activity& a = plan.activities[i];
    const std::string f = "activities[" + std::to_string(i) + "]";
    check(net.has_link(a.link), file, record, f + ".link", "dangling reference to link " + std::to_string(a.link));
    check(a.typical_duration > 0.0, file, record, f + ".typical_duration", "must be > 0");
    check(a.end_time >= 0 && a.end_time < kDaySeconds, file, record, f + ".end_time", "must be in [0, 86400)");
  }
  for (std::size_t i = 0; i < plan.legs.size(); ++i) {
    const Leg& leg = plan.legs[i];
    const std::string f = "legs[" + std::to_string(i) + "]";
    if (leg.transfers) check(*leg.transfers >= 0, file, record, f + ".transfers", "must be >= 0");
    if (is_teleported(leg.mode)) {
      check(leg.route.empty(), file, record, f + ".route", "teleported legs carry no route");
      continue;
    }
    const LinkId origin = plan.activities[i].link;
    const LinkId dest = plan.activities[i + 1].link;
    if (leg.route.empty()) {
      check(origin == dest, file, record, f + ".route", "network leg needs a route");
      continue;
    }
    NodeId at = net.link(origin).to;
    for (LinkId lid : leg.route) {
      check(net.has_link(lid), file, record, f + ".route", "dangling reference to link " + std::to_string(lid));
      const Link& l = net.link(lid);
      check(l.allows(leg.mode), file, record, f + ".route",
            "link " + std::to_string(lid) + " does not allow " + std::string(to_string(leg.mode)));
      check(l.from == at, file, record, f + ".route", "route is not connected at link " + std::to_string(lid));
      at = l.to;
    }
    check(leg.route.back() == dest, file, record, f + ".route", "route must end on the destination link");
  }
}

void validate_population(const Population& pop, const Network& net, const Zones& zones, const std::string& file) {
  std::set<AgentId> ids;
  for (const Agent& a : pop.agents) {
    const std::string r = rec("agent", a.id);
    check(ids.insert(a.id).second, file, r, "id", "duplicate id");
    check(std::isfinite(a.income) && a.income > 0.0, file, r, "income",
          "must be > 0 (the marginal utility of money divides by income)");
    check(!a.plans.empty(), file, r, "plans", "must not be empty");
    check(a.selected < a.plans.size(), file, r, "selected", "index out of range");
    for (std::size_t p = 0; p < a.plans.size(); ++p) {
      const std::string pr = r + " plan " + std::to_string(p);
      validate_plan(a.plans[p], net, file, pr);
      for (const Leg& leg : a.plans[p].legs) {
        if (leg.mode == Mode::car) check(a.car_available, file, pr, "legs.mode", "car leg without car");
        if (leg.mode == Mode::freight)
          check(a.kind == AgentKind::freight, file, pr, "legs.mode", "freight leg on a person agent");
      }
    }
    check(zones.has_zone(a.home_zone), file, r, "home_zone",
          "dangling reference to zone " + std::to_string(a.home_zone));
    const auto z = zones.zone_of_link(a.home_link());
    check(z.has_value(), file, r, "home_zone", "home link is not covered by any zone");
    check(*z == a.home_zone, file, r, "home_zone", "home link lies in zone " + std::to_string(*z));
  }
}

void validate_scenario(const Scenario& s) {
  validate(s.config);
  validate_network(s.network);
  validate_zones(s.zones, s.network);
  validate_population(s.population, s.network, s.zones);
  for (const Agent& a : s.population.agents) {
    check(static_cast<int>(a.plans.size()) <= s.config.strategy.memory_max, "population.json",
          rec("agent", a.id), "plans", "plan memory exceeds strategy.memory_max");
  }
}

// --- serialization ------------------------------------------------------------------------

namespace {

template <typename T>
T req(const Json& j, const char* key, const std::string& file, const std::string& record) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(file, record, key, "missing field");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ValidationError(file, record, key, "wrong type");
  }
}

template <typename T>
std::optional<T> opt(const Json& j, const char* key, const std::string& file, const std::string& record) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return req<T>(j, key, file, record);
}

const Json& req_array(const Json& j, const char* key, const std::string& file, const std::string& record) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(file, record, key, "missing field");
  if (!j.at(key).is_array()) throw ValidationError(file, record, key, "expected array");
  return j.at(key);
}

void check_version(const Json& j, const std::string& file) {
  if (!j.is_object()) throw ValidationError(file, "document", "root", "expected object");
  const int v = req<int>(j, "schema_version", file, "document");
  if (v != kScenarioSchemaVersion) throw ValidationError(file, "document", "schema_version", "unsupported version");
}

Mode mode_field(const Json& j, const char* key, const std::string& file, const std::string& record) {
  const auto s = req<std::string>(j, key, file, record);
  auto m = parse_mode(s);
  if (!m) throw ValidationError(file, record, key, "unknown mode '" + s + "'");
  return *m;
}

}  // namespace

Json network_to_json(const Network& net) {
  Json nodes = Json::array();
  for (const Node& n : net.nodes()) nodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
  Json links = Json::array();
  for (const Link& l : net.links()) {
    Json modes = Json::array();
    for (Mode m : l.modes) modes.push_back(std::string(to_string(m)));
    links.push_back({{"id", l.id},
                     {"from", l.from},
                     {"to", l.to},
                     {"length", l.length},
                     {"free_speed", l.free_speed},
                     {"flow_capacity", l.flow_capacity},
                     {"lanes", l.lanes},
                     {"modes", modes}});
  }
  return {{"schema_version", kScenarioSchemaVersion}, {"nodes", nodes}, {"links", links}};
}

Network network_from_json(const Json& j, const std::string& file) {
  check_version(j, file);
  std::vector<Node> nodes;
  std::size_t i = 0;
  for (const Json& n : req_array(j, "nodes", file, "document")) {
    const std::string r = "nodes[" + std::to_string(i++) + "]";
    nodes.push_back({req<NodeId>(n, "id", file, r), req<double>(n, "x", file, r), req<double>(n, "y", file, r)});
  }
  std::vector<Link> links;
  i = 0;
  for (const Json& l : req_array(j, "links", file, "document")) {
    const std::string r = "links[" + std::to_string(i++) + "]";
    Link link;
    link.id = req<LinkId>(l, "id", file, r);
    link.from = req<NodeId>(l, "from", file, r);
    link.to = req<NodeId>(l, "to", file, r);
    link.length = req<double>(l, "length", file, r);
    link.free_speed = req<double>(l, "free_speed", file, r);
    link.flow_capacity = req<double>(l, "flow_capacity", file, r);
    link.lanes = opt<int>(l, "lanes", file, r).value_or(1);
    if (l.contains("modes")) {
      link.modes.clear();
      for (const Json& m : req_array(l, "modes", file, r)) {
        auto mode = m.is_string() ? parse_mode(m.get<std::string>()) : std::nullopt;
        if (!mode) throw ValidationError(file, r, "modes", "unknown mode");
        link.modes.push_back(*mode);
      }
    }
    links.push_back(std::move(link));
  }
  Network net(std::move(nodes), std::move(links));
  validate_network(net, file);
  return net;
}

Json zones_to_json(const Zones& zones) {
  Json arr = Json::array();
  for (const Zone& z : zones.all()) {
    arr.push_back({{"id", z.id},
                   {"classification", z.classification == ZoneClass::inner ? "inner" : "outer"},
                   {"links", z.links}});
  }
  return {{"schema_version", kScenarioSchemaVersion}, {"zones", arr}};
}

Zones zones_from_json(const Json& j, const std::string& file) {
  check_version(j, file);
  std::vector<Zone> zones;
  std::size_t i = 0;
  for (const Json& z : req_array(j, "zones", file, "document")) {
    const std::string r = "zones[" + std::to_string(i++) + "]";
    Zone zone;
    zone.id = req<ZoneId>(z, "id", file, r);
    const auto cls = req<std::string>(z, "classification", file, r);
    if (cls == "inner") {
      zone.classification = ZoneClass::inner;
    } else if (cls == "outer") {
      zone.classification = ZoneClass::outer;
    } else {
      throw ValidationError(file, r, "classification", "expected inner or outer");
    }
    zone.links = req<std::vector<LinkId>>(z, "links", file, r);
    zones.push_back(std::move(zone));
  }
  return Zones(std::move(zones));
}

Json plan_to_json(const Plan& plan) {
  Json acts = Json::array();
  for (const Activity& a : plan.activities) {
    Json ja = {{"type", a.type}, {"link", a.link}, {"typical_duration", a.typical_duration}, {"end_time", a.end_time}};
    if (a.opening_time) ja["opening_time"] = *a.opening_time;
    if (a.latest_start) ja["latest_start"] = *a.latest_start;
    if (a.earliest_end) ja["earliest_end"] = *a.earliest_end;
    acts.push_back(std::move(ja));
  }
  Json legs = Json::array();
  for (const Leg& l : plan.legs) {
    Json jl = {{"mode", std::string(to_string(l.mode))}, {"route", l.route}, {"departure_time", l.departure_time}};
    if (l.transfers) jl["transfers"] = *l.transfers;
    legs.push_back(std::move(jl));
  }
  return {{"score", plan.score ? Json(*plan.score) : Json(nullptr)}, {"activities", acts}, {"legs", legs}};
}

Plan plan_from_json(const Json& j, const std::string& file, const std::string& record) {
  Plan plan;
  plan.score = opt<double>(j, "score", file, record);
  for (const Json& a : req_array(j, "activities", file, record)) {
    Activity act;
    act.type = req<std::string>(a, "type", file, record);
    act.link = req<LinkId>(a, "link", file, record);
    act.typical_duration = req<double>(a, "typical_duration", file, record);
    act.end_time = req<int>(a, "end_time", file, record);
    act.opening_time = opt<int>(a, "opening_time", file, record);
    act.latest_start = opt<int>(a, "latest_start", file, record);
    act.earliest_end = opt<int>(a, "earliest_end", file, record);
    plan.activities.push_back(std::move(act));
  }
  for (const Json& l : req_array(j, "legs", file, record)) {
    Leg leg;
    leg.mode = mode_field(l, "mode", file, record);
    leg.route = opt<std::vector<LinkId>>(l, "route", file, record).value_or(std::vector<LinkId>{});
    leg.departure_time = req<int>(l, "departure_time", file, record);
    leg.transfers = opt<int>(l, "transfers", file, record);
    plan.legs.push_back(std::move(leg));
  }
  return plan;
}

Json population_to_json(const Population& pop) {
  Json agents = Json::array();
  for (const Agent& a : pop.agents) {
    Json plans = Json::array();
    for (const Plan& p : a.plans) plans.push_back(plan_to_json(p));
    agents.push_back({{"id", a.id},
                      {"kind", a.kind == AgentKind::person ? "person" : "freight"},
                      {"income", a.income},
                      {"home_zone", a.home_zone},
                      {"car_available", a.car_available},
                      {"selected", a.selected},
                      {"plans", plans}});
  }
  return {{"schema_version", kScenarioSchemaVersion}, {"agents", agents}};
}

Population population_from_json(const Json& j, const std::string& file) {
  check_version(j, file);
  Population pop;
  std::size_t i = 0;
  for (const Json& a : req_array(j, "agents", file, "document")) {
    std::string r = "agents[" + std::to_string(i++) + "]";
    Agent agent;
    agent.id = req<AgentId>(a, "id", file, r);
    r = rec("agent", agent.id);
    const auto kind = opt<std::string>(a, "kind", file, r).value_or("person");
    if (kind == "person") {
      agent.kind = AgentKind::person;
    } else if (kind == "freight") {
      agent.kind = AgentKind::freight;
    } else {
      throw ValidationError(file, r, "kind", "expected person or freight");
    }
    agent.income = req<double>(a, "income", file, r);
    agent.home_zone = req<ZoneId>(a, "home_zone", file, r);
    agent.car_available = req<bool>(a, "car_available", file, r);
    agent.selected = opt<std::size_t>(a, "selected", file, r).value_or(0);
    std::size_t p = 0;
    for (const Json& jp : req_array(a, "plans", file, r)) {
      agent.plans.push_back(plan_from_json(jp, file, r + " plan " + std::to_string(p++)));
    }
    pop.agents.push_back(std::move(agent));
  }
  std::sort(pop.agents.begin(), pop.agents.end(), [](const Agent& x, const Agent& y) { return x.id < y.id; });
  return pop;
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path.filename().string(), "document", "file", "missing file " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.filename().string(), "document", "syntax", e.what());
  }
}

void write_json_file(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

Scenario load_scenario(const fs::path& dir) {
  Scenario s;
  s.config = config_from_json(read_json_file(dir / "config.json"));
  s.network = network_from_json(read_json_file(dir / "network.json"));
  s.zones = zones_from_json(read_json_file(dir / "zones.json"));
  validate_zones(s.zones, s.network);
  s.population = population_from_json(read_json_file(dir / "population.json"));
  validate_scenario(s);
  return s;
}

void save_scenario(const Scenario& s, const fs::path& dir) {
  fs::create_directories(dir);
  write_json_file(dir / "config.json", to_json(s.config));
  write_json_file(dir / "network.json", network_to_json(s.network));
  write_json_file(dir / "zones.json", zones_to_json(s.zones));
  write_json_file(dir / "population.json", population_to_json(s.population));
}

Scenario apply_modifiers(Scenario s, const ScenarioConfig& cfg) {
  for (Link& l : s.network.mutable_links()) l.flow_capacity *= cfg.capacity_multiplier;
  s.config.scoring.constant[index(Mode::pt)] *= cfg.pt_constant_multiplier;
  return s;
}

}  // namespace tollsim
