#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tollsim/scenario.hpp"

namespace tollsim::test {

inline Link link(LinkId id, NodeId from, NodeId to, double length, double speed, double cap, int lanes = 1) {
  Link l;
  l.id = id;
  l.from = from;
  l.to = to;
  l.length = length;
  l.free_speed = speed;
  l.flow_capacity = cap;
  l.lanes = lanes;
  return l;
}

/// Nodes 1..n+1 on the x axis, links 1..n from node i to i+1.
inline Network line(int n, double length = 1000.0, double speed = 10.0, double cap = 3600.0) {
  std::vector<Node> nodes;
  std::vector<Link> links;
  for (int i = 1; i <= n + 1; ++i) nodes.push_back(Node{static_cast<NodeId>(i), (i - 1) * length, 0.0});
  for (int i = 1; i <= n; ++i)
    links.push_back(link(static_cast<LinkId>(i), static_cast<NodeId>(i), static_cast<NodeId>(i + 1), length, speed, cap));
  return Network(nodes, links);
}

inline Activity activity(std::string type, LinkId l, double typical_h, int end_time) {
  Activity a;
  a.type = std::move(type);
  a.link = l;
  a.typical_duration = typical_h * 3600.0;
  a.end_time = end_time;
  return a;
}

/// home -> work -> home with the given routes (links after the origin, ending at the destination).
inline Plan commute(LinkId home, LinkId work, Mode mode, std::vector<LinkId> out, std::vector<LinkId> back,
                    int depart, int work_end) {
  Plan p;
  p.activities = {activity("home", home, 12.0, depart), activity("work", work, 8.0, work_end),
                  activity("home", home, 12.0, kDaySeconds - 1)};
  p.legs = {Leg{mode, std::move(out), depart, std::nullopt}, Leg{mode, std::move(back), work_end, std::nullopt}};
  return p;
}

/// One car leg from `origin` to the last link of `route`, then a final activity there.
inline Plan one_way(LinkId origin, std::vector<LinkId> route, int depart, Mode mode = Mode::car) {
  Plan p;
  const LinkId dest = route.empty() ? origin : route.back();
  p.activities = {activity("home", origin, 12.0, depart), activity("home", dest, 12.0, kDaySeconds - 1)};
  p.legs = {Leg{mode, std::move(route), depart, std::nullopt}};
  return p;
}

inline Agent person(AgentId id, Plan plan, double income = 20000.0, bool car = true, ZoneId zone = 0) {
  Agent a;
  a.id = id;
  a.income = income;
  a.car_available = car;
  a.home_zone = zone;
  a.plans.push_back(std::move(plan));
  return a;
}

/// Square loop 1 -> 2 -> 3 -> 4 -> 1 with 1 km sides; link 1 ends at node 1, link 3 at node 3.
inline Network square(double cap = 1000.0) {
  std::vector<Node> nodes{{1, 0, 0}, {2, 1000, 0}, {3, 1000, 1000}, {4, 0, 1000}};
  std::vector<Link> links{link(1, 4, 1, 1000, 10, cap), link(2, 1, 2, 1000, 10, cap), link(3, 2, 3, 1000, 10, cap),
                          link(4, 3, 4, 1000, 10, cap)};
  return Network(nodes, links);
}

/// `n` car commuters from link 1 to link 3 on the square, one zone holding every link.
inline Scenario small_scenario(int n, double cap = 1000.0) {
  Scenario s;
  s.network = square(cap);
  s.zones = Zones({Zone{0, ZoneClass::inner, {1, 2, 3, 4}}});
  for (int i = 1; i <= n; ++i) {
    const int depart = 7 * 3600 + 10 * i;
    s.population.agents.push_back(person(static_cast<AgentId>(i),
                                         commute(1, 3, Mode::car, {2, 3}, {4, 1}, depart, 16 * 3600 + 10 * i),
                                         10000.0 + 1000.0 * i));
  }
  s.config.scenario.sample_scale = 1.0;
  s.config.scenario.iterations = 5;
  return s;
}

/// Fresh empty directory below the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("tollsim_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace tollsim::test
