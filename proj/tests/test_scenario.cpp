#include <doctest.h>

#include <set>

#include "support.hpp"
#include "tollsim/error.hpp"
#include "tollsim/scenario.hpp"

using namespace tollsim;

namespace {

std::string failing(const Scenario& s) {
  try {
    validate_scenario(s);
  } catch (const ValidationError& e) {
    return e.file() + "|" + e.field();
  }
  return "";
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("minimal two-node scenario from disk") {
    const auto dir = test::temp_dir("two_node");
    write_json_file(dir / "network.json",
                    Json{{"schema_version", 1},
                         {"nodes", {{{"id", 1}, {"x", 0}, {"y", 0}}, {{"id", 2}, {"x", 1000}, {"y", 0}}}},
                         {"links",
                          {{{"id", 1}, {"from", 1}, {"to", 2}, {"length", 1000}, {"free_speed", 12.5},
                            {"flow_capacity", 1800}},
                           {{"id", 2}, {"from", 2}, {"to", 1}, {"length", 1000}, {"free_speed", 12.5},
                            {"flow_capacity", 1800}, {"lanes", 2}, {"modes", {"car"}}}}}});
    write_json_file(dir / "zones.json",
                    Json{{"schema_version", 1},
                         {"zones", {{{"id", 0}, {"classification", "inner"}, {"links", {1, 2}}}}}});
    const Json home = {{"type", "home"}, {"link", 2}, {"typical_duration", 43200}, {"end_time", 28800}};
    const Json work = {{"type", "work"}, {"link", 1}, {"typical_duration", 28800}, {"end_time", 61200}};
    const Json home2 = {{"type", "home"}, {"link", 2}, {"typical_duration", 43200}, {"end_time", 86399}};
    write_json_file(dir / "population.json",
                    Json{{"schema_version", 1},
                         {"agents",
                          {{{"id", 7},
                            {"income", 25000},
                            {"home_zone", 0},
                            {"car_available", true},
                            {"plans",
                             {{{"activities", {home, work, home2}},
                               {"legs",
                                {{{"mode", "car"}, {"route", {1}}, {"departure_time", 28800}},
                                 {{"mode", "car"}, {"route", {2}}, {"departure_time", 61200}}}}}}}}}}});
    write_json_file(dir / "config.json", Json::object());
    const Scenario s = load_scenario(dir);
    CHECK(s.network.links().size() == 2);
    CHECK(s.network.link(1).free_flow_time() == doctest::Approx(80.0));
    CHECK(s.network.link(2).lanes == 2);
    CHECK(s.network.link(2).modes == std::vector<Mode>{Mode::car});
    CHECK(s.network.link(1).allows(Mode::freight));
    CHECK(!s.network.link(2).allows(Mode::freight));
    REQUIRE(s.population.agents.size() == 1);
    CHECK(s.population.agents[0].home_link() == 2);
    CHECK(!s.population.agents[0].plans[0].score);
    CHECK(s.zones.zone_of_link(1) == ZoneId{0});
  }

  TEST_CASE("save and load round trip") {
    Scenario s = test::small_scenario(3);
    s.population.agents[1].plans[0].score = -12.5;
    s.population.agents[2].plans[0].activities[1].latest_start = 9 * 3600;
    s.population.agents[2].plans[0].legs[0].transfers = 1;
    const auto dir = test::temp_dir("round_trip");
    save_scenario(s, dir);
    CHECK(load_scenario(dir) == s);
  }

  TEST_CASE("validation names the offending file and field") {
    Scenario s = test::small_scenario(2);
    CHECK(failing(s).empty());

    Scenario zero_income = s;
    zero_income.population.agents[0].income = 0.0;
    CHECK(failing(zero_income) == "population.json|income");

    Scenario bad_cap = s;
    bad_cap.network.mutable_links()[0].flow_capacity = 0.0;
    CHECK(failing(bad_cap) == "network.json|flow_capacity");

    Scenario broken_route = s;
    broken_route.population.agents[0].plans[0].legs[0].route = {3};
    CHECK(failing(broken_route) == "population.json|legs[0].route");

    Scenario no_car = s;
    no_car.population.agents[0].car_available = false;
    CHECK(failing(no_car) == "population.json|legs.mode");

    Scenario dangling_zone = s;
    dangling_zone.population.agents[0].home_zone = 9;
    CHECK(failing(dangling_zone) == "population.json|home_zone");

    Scenario too_many = s;
    too_many.config.strategy.memory_max = 1;
    too_many.population.agents[0].plans.push_back(too_many.population.agents[0].plans[0]);
    CHECK(failing(too_many) == "population.json|plans");

    Scenario mismatched = s;
    mismatched.population.agents[0].plans[0].legs.pop_back();
    CHECK(failing(mismatched) == "population.json|legs");
  }

  TEST_CASE("dangling references") {
    std::vector<Node> nodes{{1, 0, 0}, {2, 10, 0}};
    std::vector<Link> links{test::link(1, 1, 3, 10, 1, 100)};
    try {
      validate_network(Network(nodes, links));
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "to");
      CHECK(e.record() == "link 1");
    }
    const Network net = test::line(1);
    CHECK_THROWS_AS(validate_zones(Zones({Zone{0, ZoneClass::outer, {2}}}), net), ValidationError);
    CHECK_THROWS_AS(validate_zones(Zones({Zone{0, ZoneClass::outer, {1}}, Zone{1, ZoneClass::outer, {1}}}), net),
                    ValidationError);
  }

  TEST_CASE("malformed files") {
    const auto dir = test::temp_dir("malformed");
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK_THROWS_AS(read_json_file(dir / "bad.json"), ValidationError);
    CHECK_THROWS_AS(read_json_file(dir / "absent.json"), ValidationError);
    CHECK_THROWS_AS(network_from_json(Json{{"schema_version", 2}, {"nodes", Json::array()}, {"links", Json::array()}}),
                    ValidationError);
    CHECK_THROWS_AS(zones_from_json(Json{{"schema_version", 1},
                                         {"zones", {{{"id", 0}, {"classification", "suburb"}, {"links", {1}}}}}}),
                    ValidationError);
  }

  TEST_CASE("modifiers scale capacity and the pt constant") {
    Scenario s = test::small_scenario(1);
    ScenarioConfig cfg;
    cfg.capacity_multiplier = 1.1;
    cfg.pt_constant_multiplier = 0.8;
    const Scenario m = apply_modifiers(s, cfg);
    CHECK(m.network.link(1).flow_capacity == doctest::Approx(1100.0));
    CHECK(m.config.scoring.constant[index(Mode::pt)] == doctest::Approx(-1.6));
    CHECK(m.config.scoring.constant[index(Mode::car)] == 0.0);

    CHECK(apply_modifiers(s, ScenarioConfig{}) == s);

    ScenarioConfig inv;
    inv.capacity_multiplier = 1.0 / 1.1;
    inv.pt_constant_multiplier = 1.0 / 0.8;
    const Scenario back = apply_modifiers(m, inv);
    for (const Link& l : back.network.links()) CHECK(std::abs(l.flow_capacity - 1000.0) < 1e-12 * 1000.0);
    CHECK(std::abs(back.config.scoring.constant[index(Mode::pt)] + 2.0) < 1e-12);
  }

  TEST_CASE("average income covers persons only") {
    Population p;
    p.agents.push_back(test::person(1, test::one_way(1, {}, 0), 10000));
    p.agents.push_back(test::person(2, test::one_way(1, {}, 0), 30000));
    Agent f = test::person(3, test::one_way(1, {}, 0), 1e6);
    f.kind = AgentKind::freight;
    p.agents.push_back(f);
    CHECK(p.average_income() == 20000.0);
  }
}

TEST_SUITE("synthetic") {
  TEST_CASE("generation is deterministic in spec and seed") {
    SynthSpec spec;
    spec.agents = 200;
    const Scenario a = generate_synthetic(spec, 3);
    const Scenario b = generate_synthetic(spec, 3);
    CHECK(a == b);
    CHECK(!(generate_synthetic(spec, 4).population == a.population));
  }

  TEST_CASE("corridor population is valid and complete") {
    SynthSpec spec;
    spec.agents = 300;
    const Scenario s = generate_synthetic(spec, 11);
    CHECK_NOTHROW(validate_scenario(s));
    CHECK(s.population.agents.size() == 300);
    CHECK(s.config.scenario.sample_scale == 0.1);
    int freight = 0, car = 0, persons = 0;
    for (const Agent& a : s.population.agents) {
      CHECK(a.income > 0.0);
      CHECK(a.plans.size() == 1);
      if (a.kind == AgentKind::freight) {
        ++freight;
        continue;
      }
      ++persons;
      car += a.car_available;
    }
    CHECK(freight == doctest::Approx(300 * spec.freight_share).epsilon(0.5));
    CHECK(car > 0);
    CHECK(car < persons);
  }

  TEST_CASE("radial layout has one inner zone per sector and rings outside") {
    SynthSpec spec;
    spec.layout = SynthLayout::radial;
    spec.agents = 400;
    const Scenario s = generate_synthetic(spec, 5);
    CHECK_NOTHROW(validate_scenario(s));
    int inner = 0;
    for (const Zone& z : s.zones.all()) inner += z.classification == ZoneClass::inner;
    CHECK(inner >= 1);
    CHECK(inner < static_cast<int>(s.zones.all().size()));
    std::set<ZoneId> homes;
    for (const Agent& a : s.population.agents) homes.insert(a.home_zone);
    CHECK(homes.size() > 1);
  }

  TEST_CASE("spec json round trip and validation") {
    SynthSpec spec;
    spec.layout = SynthLayout::radial;
    spec.agents = 123;
    spec.inner_car_factor = 0.25;
    spec.work_window_s = 1800;
    const SynthSpec back = synth_spec_from_json(synth_spec_to_json(spec));
    CHECK(synth_spec_to_json(back) == synth_spec_to_json(spec));
    Json bad = synth_spec_to_json(spec);
    bad["agents"] = 0;
    CHECK_THROWS_AS(synth_spec_from_json(bad), ValidationError);
    bad = synth_spec_to_json(spec);
    bad["inner_car_factor"] = 1.5;
    CHECK_THROWS_AS(synth_spec_from_json(bad), ValidationError);
  }

  TEST_CASE("bundled specs load") {
    const auto dir = std::filesystem::path(TOLLSIM_DATA_DIR) / "scenarios";
    const SynthSpec c = synth_spec_from_json(read_json_file(dir / "corridor.json"));
    CHECK(c.layout == SynthLayout::corridor);
    CHECK(c.agents == 1000);
    const SynthSpec r = synth_spec_from_json(read_json_file(dir / "radial.json"));
    CHECK(r.layout == SynthLayout::radial);
    CHECK(r.agents == 3000);
  }
}
