#include <doctest.h>

#include <numeric>

#include "support.hpp"
#include "tollsim/controller.hpp"
#include "tollsim/error.hpp"
#include "tollsim/manifest.hpp"

using namespace tollsim;

namespace {

// 30 commuters through a 120 veh/h bottleneck on link 3
Scenario bottleneck(bool toll, int iterations = 12) {
  Scenario s = test::small_scenario(30);
  s.network.mutable_links()[s.network.link_index(3)].flow_capacity = 120.0;
  s.config.scenario.iterations = iterations;
  s.config.scenario.toll_enabled = toll;
  s.config.scenario.rng_seed = 99;
  return s;
}

double money_in(const EventLog& log) {
  double m = 0.0;
  for (const Event& e : log)
    if (e.kind == EventKind::money) m -= e.amount;
  return m;
}

}  // namespace

TEST_SUITE("controller") {
  TEST_CASE("scenario presets") {
    ScenarioConfig base;
    base.iterations = 77;
    const auto ref = preset(ScenarioKind::reference, base);
    CHECK(!ref.toll_enabled);
    CHECK(ref.capacity_multiplier == 1.0);
    const auto con = preset(ScenarioKind::congestion, base);
    CHECK(con.toll_enabled);
    CHECK(con.capacity_multiplier == 1.0);
    CHECK(con.pt_constant_multiplier == 1.0);
    const auto plus = preset(ScenarioKind::congestion_plus, base);
    CHECK(plus.toll_enabled);
    CHECK(plus.capacity_multiplier == 1.1);
    CHECK(plus.pt_constant_multiplier == 0.8);
    CHECK(plus.iterations == 77);
    for (auto k : {ScenarioKind::reference, ScenarioKind::congestion, ScenarioKind::congestion_plus})
      CHECK(parse_scenario_kind(to_string(k)) == k);
    CHECK(!parse_scenario_kind("Congestion"));
  }

  TEST_CASE("innovation is switched off for the final share of iterations") {
    for (int k = 1; k <= 8; ++k) CHECK(innovation_active(k, 10, 0.8));
    CHECK(!innovation_active(9, 10, 0.8));
    CHECK(!innovation_active(10, 10, 0.8));
    CHECK(innovation_active(80, 100, 0.8));
    CHECK(!innovation_active(81, 100, 0.8));
    CHECK(!innovation_active(1, 10, 0.0));
    CHECK(innovation_active(10, 10, 1.0));
  }

  TEST_CASE("marginal utility of money per agent") {
    Scenario s = test::small_scenario(3);  // incomes 11000, 12000, 13000
    const auto b = agent_beta_m(s);
    REQUIRE(b.size() == 3);
    CHECK(b[1] == doctest::Approx(1.0));
    CHECK(b[0] > b[1]);
    CHECK(b[2] < b[1]);
    s.config.scoring.population_average_income = 24000.0;
    CHECK(agent_beta_m(s)[1] == doctest::Approx(2.0));
  }

  TEST_CASE("reference run collects no money") {
    const RunResult r = run_loop(bottleneck(false));
    CHECK(r.stats.size() == 12);
    CHECK(r.tolls.empty());
    CHECK(r.next_tolls.empty());
    CHECK(money_in(r.events) == 0.0);
    for (const auto& st : r.stats) CHECK(st.toll_revenue == 0.0);
    CHECK(r.stats.front().delay_hours > 0.0);
  }

  TEST_CASE("toll run charges the schedule it reports") {
    const RunResult r = run_loop(bottleneck(true));
    CHECK(!r.tolls.empty());
    for (const auto& [link, row] : r.next_tolls.by_link())
      for (double v : row) CHECK(v >= 0.0);
    CHECK(r.stats.front().toll_revenue == 0.0);  // nothing measured before the first day
    CHECK(r.stats.back().toll_revenue == doctest::Approx(money_in(r.events)));
    // every money event matches the applied schedule at the exit time
    for (const Event& e : r.events) {
      if (e.kind != EventKind::money) continue;
      REQUIRE(e.link);
      CHECK(-e.amount == doctest::Approx(toll_for(*e.link, e.time, r.tolls)));
    }
  }

  TEST_CASE("memory bound, scored plans and no innovation without budget") {
    const RunResult r = run_loop(bottleneck(true));
    for (const Agent& a : r.scenario.population.agents) {
      CHECK(a.plans.size() <= 5);
      CHECK(a.selected_plan().score.has_value());
    }
    Scenario frozen = bottleneck(false, 6);
    frozen.config.scenario.innovation_fraction = 0.0;
    const RunResult f = run_loop(frozen);
    for (const Agent& a : f.scenario.population.agents) CHECK(a.plans.size() == 1);
  }

  TEST_CASE("runs are deterministic and keep the population identity") {
    const Scenario s = bottleneck(true);
    const RunResult a = run_loop(s);
    const RunResult b = run_loop(s);
    CHECK(a.events == b.events);
    CHECK(a.scenario.population == b.scenario.population);
    CHECK(a.next_tolls == b.next_tolls);
    CHECK(population_hash(a.scenario.population) == population_hash(s.population));
  }

  TEST_CASE("output files") {
    const auto dir = test::temp_dir("controller_out");
    RunOptions o;
    o.output_dir = dir;
    o.first_iteration = 101;
    const RunResult r = run_loop(bottleneck(true, 4), o);
    for (const char* f : {"events.csv", "iterations.csv", "scorestats.csv", "tolls.csv", "next_tolls.csv"})
      CHECK(std::filesystem::exists(dir / f));
    CHECK(std::filesystem::exists(dir / "tolls" / "iteration_104.csv"));
    CHECK(read_events(dir / "events.csv") == r.events);
    const auto st = read_iteration_stats(dir / "iterations.csv");
    REQUIRE(st.size() == 4);
    CHECK(st.front().iteration == 101);
    CHECK(st.back().car_trips == r.stats.back().car_trips);
    CHECK(st.back().toll_revenue == doctest::Approx(r.stats.back().toll_revenue));
  }

  TEST_CASE("warm start tolls must share the interval") {
    RunOptions o;
    o.initial_tolls = TollSchedule(600);
    o.initial_tolls.set(3, 1, 0.1);
    CHECK_THROWS_AS(run_loop(bottleneck(true, 2), o), Error);
  }
}

TEST_SUITE("manifest") {
  TEST_CASE("sha256 reference digests") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const auto dir = test::temp_dir("sha");
    std::ofstream(dir / "f.txt", std::ios::binary) << "abc";
    CHECK(sha256_file(dir / "f.txt") == sha256_hex("abc"));
  }

  TEST_CASE("population hash ignores plans") {
    Scenario s = test::small_scenario(4);
    const std::string h = population_hash(s.population);
    s.population.agents[0].plans[0].score = 3.0;
    s.population.agents[0].plans.push_back(s.population.agents[0].plans[0]);
    CHECK(population_hash(s.population) == h);
    s.population.agents[2].income += 1.0;
    CHECK(population_hash(s.population) != h);
  }

  TEST_CASE("checksums and manifest round trip") {
    const auto dir = test::temp_dir("manifest");
    std::filesystem::create_directories(dir / "sub");
    std::ofstream(dir / "b.txt") << "two";
    std::ofstream(dir / "a.txt") << "one";
    std::ofstream(dir / "sub" / "c.txt") << "three";
    const Json c = checksums(dir);
    REQUIRE(c.size() == 3);
    CHECK(c.at("a.txt") == sha256_hex("one"));
    CHECK(c.at("sub/c.txt") == sha256_hex("three"));
    write_manifest(dir, Json{{"command", "test"}});
    const Json m = read_manifest(dir);
    CHECK(m.at("command") == "test");
    CHECK(checksums(dir) == c);  // manifest.json itself is excluded
  }
}
