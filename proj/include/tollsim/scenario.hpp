#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tollsim/config.hpp"
#include "tollsim/mode.hpp"

namespace tollsim {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;
using AgentId = std::uint32_t;
using ZoneId = std::int32_t;

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr int kDaySeconds = 86400;

struct Node {
  NodeId id = 0;
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Node&) const = default;
};

struct Link {
  LinkId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  double length = 0.0;         // m
  double free_speed = 0.0;     // m/s
  double flow_capacity = 0.0;  // veh/h at full population
  int lanes = 1;
  std::vector<Mode> modes{Mode::car, Mode::ride, Mode::freight};

  double free_flow_time() const noexcept { return length / free_speed; }
  bool allows(Mode m) const noexcept;

  bool operator==(const Link&) const = default;
};

/// Directed road graph. Links are kept sorted by id; lookups go through id maps.
class Network {
 public:
  Network() = default;
  Network(std::vector<Node> nodes, std::vector<Link> links);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Link>& links() const noexcept { return links_; }
  std::vector<Link>& mutable_links() noexcept { return links_; }

  bool has_node(NodeId id) const { return node_index_.contains(id); }
  bool has_link(LinkId id) const { return link_index_.contains(id); }
  std::size_t node_index(NodeId id) const { return node_index_.at(id); }
  std::size_t link_index(LinkId id) const { return link_index_.at(id); }
  const Node& node(NodeId id) const { return nodes_[node_index(id)]; }
  const Link& link(LinkId id) const { return links_[link_index(id)]; }

  /// Indices (into links()) of links leaving the node with the given index, sorted by link id.
  const std::vector<std::size_t>& out_links(std::size_t node_idx) const { return out_[node_idx]; }

  /// Midpoint of a link; activity coordinates for beeline distances.
  std::pair<double, double> link_coord(LinkId id) const;

  bool operator==(const Network& o) const { return nodes_ == o.nodes_ && links_ == o.links_; }

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::unordered_map<NodeId, std::size_t> node_index_;
  std::unordered_map<LinkId, std::size_t> link_index_;
  std::vector<std::vector<std::size_t>> out_;
};

enum class ZoneClass { inner, outer };

struct Zone {
  ZoneId id = 0;
  ZoneClass classification = ZoneClass::outer;
  std::vector<LinkId> links;

  bool operator==(const Zone&) const = default;
};

class Zones {
 public:
  Zones() = default;
  explicit Zones(std::vector<Zone> zones);

  const std::vector<Zone>& all() const noexcept { return zones_; }
  std::optional<ZoneId> zone_of_link(LinkId link) const;
  const Zone& zone(ZoneId id) const;
  bool has_zone(ZoneId id) const { return index_.contains(id); }

  bool operator==(const Zones& o) const { return zones_ == o.zones_; }

 private:
  std::vector<Zone> zones_;
  std::unordered_map<ZoneId, std::size_t> index_;
  std::unordered_map<LinkId, ZoneId> link_zone_;
};

struct Activity {
  std::string type;
  LinkId link = 0;
  double typical_duration = 0.0;  // s
  int end_time = 0;               // planned end, seconds of day; unused for the last activity
  std::optional<int> opening_time;
  std::optional<int> latest_start;
  std::optional<int> earliest_end;

  bool operator==(const Activity&) const = default;
};

struct Leg {
  Mode mode = Mode::car;
  std::vector<LinkId> route;  // network modes only
  int departure_time = 0;     // planned; follows from the preceding activity's end
  std::optional<int> transfers;

  bool operator==(const Leg&) const = default;
};

/// Activity, Leg, Activity, ... with activities.size() == legs.size() + 1.
struct Plan {
  std::vector<Activity> activities;
  std::vector<Leg> legs;
  std::optional<double> score;

  bool operator==(const Plan&) const = default;
};

enum class AgentKind { person, freight };

struct Agent {
  AgentId id = 0;
  AgentKind kind = AgentKind::person;
  double income = 0.0;
  ZoneId home_zone = 0;
  bool car_available = false;
  std::vector<Plan> plans;
  std::size_t selected = 0;

  const Plan& selected_plan() const { return plans.at(selected); }
  Plan& selected_plan() { return plans.at(selected); }
  LinkId home_link() const { return plans.at(0).activities.at(0).link; }

  bool operator==(const Agent&) const = default;
};

struct Population {
  std::vector<Agent> agents;  // sorted by id

  /// Mean income of person agents (freight agents excluded).
  double average_income() const;

  bool operator==(const Population&) const = default;
};

struct Scenario {
  Network network;
  Population population;
  Zones zones;
  Config config;

  bool operator==(const Scenario& o) const {
    return network == o.network && population == o.population && zones == o.zones &&
           to_json(config) == to_json(o.config);
  }
};

// --- validation ---------------------------------------------------------------------------

void validate_network(const Network& net, const std::string& file = "network.json");
void validate_zones(const Zones& zones, const Network& net, const std::string& file = "zones.json");
void validate_plan(const Plan& plan, const Network& net, const std::string& file, const std::string& record);
void validate_population(const Population& pop, const Network& net, const Zones& zones,
                         const std::string& file = "population.json");
void validate_scenario(const Scenario& s);

// --- serialization ------------------------------------------------------------------------

Json network_to_json(const Network& net);
Network network_from_json(const Json& j, const std::string& file = "network.json");
Json zones_to_json(const Zones& zones);
Zones zones_from_json(const Json& j, const std::string& file = "zones.json");
Json plan_to_json(const Plan& plan);
Plan plan_from_json(const Json& j, const std::string& file, const std::string& record);
Json population_to_json(const Population& pop);
Population population_from_json(const Json& j, const std::string& file = "population.json");

/// Reads network.json, population.json, zones.json and config.json from `dir` and validates
/// them together.
Scenario load_scenario(const std::filesystem::path& dir);
void save_scenario(const Scenario& s, const std::filesystem::path& dir);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

// --- modifiers ----------------------------------------------------------------------------

/// Scales link flow capacities and the PT mode constant by the multipliers in `cfg`.
Scenario apply_modifiers(Scenario s, const ScenarioConfig& cfg);

// --- synthetic scenarios ------------------------------------------------------------------

enum class SynthLayout { corridor, radial };

struct SynthSpec {
  SynthLayout layout = SynthLayout::corridor;
  int agents = 1000;
  double income_median = 24000.0;
  double income_sigma = 0.6;
  /// P(car available) = car_base + car_income_slope * income percentile, clipped to [0, 1].
  double car_base = 0.55;
  double car_income_slope = 0.4;
  double initial_car_share = 0.85;  // among car-available agents
  double inner_car_factor = 0.5;    // scales P(car available) for homes in inner zones
  double shop_share = 0.2;          // agents with an extra evening shopping stop
  double freight_share = 0.02;
  int rings = 3;    // radial only
  int sectors = 8;  // radial only
  int work_start_mean_s = 8 * 3600;
  int work_start_spread_s = 3600;
  int work_window_s = 3600;  // work opens this long before the planned start
};

Json synth_spec_to_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const Json& j, const std::string& file = "spec.json");

/// Deterministic in (spec, seed). Config carries defaults with sample_scale 0.1.
Scenario generate_synthetic(const SynthSpec& spec, std::uint64_t seed);

}  // namespace tollsim
