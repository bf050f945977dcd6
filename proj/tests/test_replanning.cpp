#include <doctest.h>

#include <set>

#include "support.hpp"
#include "tollsim/error.hpp"
#include "tollsim/replanning.hpp"

using namespace tollsim;

namespace {

Agent with_scores(std::initializer_list<std::optional<double>> scores) {
  Agent a;
  a.id = 1;
  a.income = 1.0;
  for (auto s : scores) {
    Plan p = test::commute(1, 2, Mode::car, {2}, {1}, 7 * 3600, 16 * 3600);
    p.score = s;
    a.plans.push_back(p);
  }
  return a;
}

// home(1) -> work(3) -> home(1) -> shop(3) -> home(1) on a loop 1 -> 2 -> 3 -> 4 -> 1
Network loop() {
  std::vector<Node> nodes{{1, 0, 0}, {2, 1000, 0}, {3, 1000, 1000}, {4, 0, 1000}};
  std::vector<Link> links{test::link(1, 4, 1, 1000, 10, 1000), test::link(2, 1, 2, 1000, 10, 1000),
                          test::link(3, 2, 3, 1000, 10, 1000), test::link(4, 3, 4, 1000, 10, 1000)};
  return Network(nodes, links);
}

Plan two_tours(Mode m) {
  Plan p;
  p.activities = {test::activity("home", 1, 10, 7 * 3600), test::activity("work", 3, 8, 15 * 3600),
                  test::activity("home", 1, 10, 17 * 3600), test::activity("shop", 3, 1, 18 * 3600),
                  test::activity("home", 1, 10, kDaySeconds - 1)};
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<LinkId> r = i % 2 == 0 ? std::vector<LinkId>{2, 3} : std::vector<LinkId>{4, 1};
    p.legs.push_back(Leg{m, is_network_mode(m) ? r : std::vector<LinkId>{}, p.activities[i].end_time, std::nullopt});
  }
  return p;
}

}  // namespace

TEST_SUITE("replanning") {
  TEST_CASE("single plan is always selected") {
    const Agent a = with_scores({1.0});
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(select_plan(a, 1.0, rng) == 0);
  }

  TEST_CASE("unscored plans come first") {
    const Agent a = with_scores({5.0, std::nullopt, 7.0, std::nullopt});
    Rng rng(1);
    CHECK(select_plan(a, 1.0, rng) == 1);
  }

  TEST_CASE("equal scores split evenly") {
    const Agent a = with_scores({3.0, 3.0});
    Rng rng(42);
    int first = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) first += select_plan(a, 1.0, rng) == 0;
    CHECK(std::abs(first / double(n) - 0.5) <= 0.02);
  }

  TEST_CASE("logit frequencies") {
    const Agent a = with_scores({0.0, std::log(3.0)});
    Rng rng(7);
    int second = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) second += select_plan(a, 1.0, rng) == 1;
    CHECK(std::abs(second / double(n) - 0.75) <= 0.02);
  }

  TEST_CASE("a 100 util gap is decisive") {
    const Agent a = with_scores({0.0, 100.0});
    Rng rng(3);
    int better = 0;
    for (int i = 0; i < 10000; ++i) better += select_plan(a, 1.0, rng) == 1;
    CHECK(better / 10000.0 > 0.999);
  }

  TEST_CASE("zero temperature picks the best") {
    const Agent a = with_scores({1.0, 9.0, 4.0, 9.0});
    Rng rng(3);
    CHECK(select_plan(a, 0.0, rng) == 1);
  }

  TEST_CASE("empty memory is an error") {
    Agent a;
    Rng rng(1);
    CHECK_THROWS_AS(select_plan(a, 1.0, rng), Error);
  }

  TEST_CASE("time mutation") {
    const Plan p = test::commute(1, 2, Mode::car, {2}, {1}, 7 * 3600, 16 * 3600);
    Rng r0(1);
    const Plan same = mutate_times(p, 0, r0);
    CHECK(same.activities == p.activities);
    CHECK(!same.score);

    Rng a(99), b(99);
    CHECK(mutate_times(p, 1800, a) == mutate_times(p, 1800, b));

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      Rng rng(seed);
      const Plan m = mutate_times(p, 1800, rng);
      CHECK(std::abs(m.activities[0].end_time - p.activities[0].end_time) <= 1800);
      CHECK(m.activities.back().end_time == p.activities.back().end_time);
      for (std::size_t i = 0; i < m.legs.size(); ++i) CHECK(m.legs[i].departure_time == m.activities[i].end_time);
      CHECK(m.legs.size() == p.legs.size());
    }
  }

  TEST_CASE("time mutation clamps to the day") {
    Plan p = test::commute(1, 2, Mode::car, {2}, {1}, 600, 86000);
    bool hit_zero = false, hit_end = false;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Rng rng(seed);
      const Plan m = mutate_times(p, 900, rng);
      CHECK(m.activities[0].end_time >= 0);
      CHECK(m.activities[1].end_time < kDaySeconds);
      hit_zero |= m.activities[0].end_time == 0;
      hit_end |= m.activities[1].end_time == kDaySeconds - 1;
    }
    CHECK(hit_zero);
    CHECK(hit_end);
  }

  TEST_CASE("reroute follows current costs and leaves teleported legs alone") {
    const Network net = loop();
    const TravelTimeTable tt;
    const TollSchedule tolls(900);
    const Router router(net, tt, tolls);
    Plan p = two_tours(Mode::car);
    p.legs[0].route = {2, 3, 4, 1, 2, 3};  // a silly loop
    p.score = 12.0;
    const Plan r = reroute(p, router, ScoringParams{}, 1.0);
    CHECK(r.legs[0].route == std::vector<LinkId>{2, 3});
    CHECK(!r.score);
    const Plan pt = two_tours(Mode::pt);
    CHECK(reroute(pt, router, ScoringParams{}, 1.0).legs == pt.legs);
  }

  TEST_CASE("tours split at home") {
    const auto t = tours(two_tours(Mode::car));
    REQUIRE(t.size() == 2);
    CHECK(t[0] == std::pair<std::size_t, std::size_t>{0, 2});
    CHECK(t[1] == std::pair<std::size_t, std::size_t>{2, 4});
  }

  TEST_CASE("available modes") {
    Agent a;
    a.car_available = false;
    CHECK(available_modes(a) == std::vector<Mode>{Mode::pt, Mode::bicycle, Mode::walk});
    a.car_available = true;
    CHECK(available_modes(a).front() == Mode::car);
    a.kind = AgentKind::freight;
    CHECK(available_modes(a) == std::vector<Mode>{Mode::freight});
  }

  TEST_CASE("mode change flips one whole tour") {
    const Network net = loop();
    const TravelTimeTable tt;
    const TollSchedule tolls(900);
    const Router router(net, tt, tolls);
    const Plan p = two_tours(Mode::car);
    const std::vector<Mode> no_car{Mode::pt, Mode::bicycle, Mode::walk};
    std::set<std::size_t> flipped_first;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      Rng rng(seed);
      const Plan m = change_mode(p, no_car, router, ScoringParams{}, 1.0, rng);
      const bool first = m.legs[0].mode != Mode::car;
      const std::size_t lo = first ? 0 : 2;
      const std::size_t other = first ? 2 : 0;
      CHECK(m.legs[lo].mode == m.legs[lo + 1].mode);
      CHECK(m.legs[lo].mode != Mode::car);
      CHECK(m.legs[lo].route.empty());
      CHECK(m.legs[other].mode == Mode::car);
      CHECK(m.legs[other].route == p.legs[other].route);
      flipped_first.insert(lo);
    }
    CHECK(flipped_first.size() == 2);
  }

  TEST_CASE("mode change to car builds routes") {
    const Network net = loop();
    const TravelTimeTable tt;
    const TollSchedule tolls(900);
    const Router router(net, tt, tolls);
    Plan p = two_tours(Mode::pt);
    p.activities.resize(3);
    p.legs.resize(2);
    const std::vector<Mode> modes{Mode::car, Mode::pt};
    Rng rng(5);
    const Plan m = change_mode(p, modes, router, ScoringParams{}, 1.0, rng);
    CHECK(m.legs[0].mode == Mode::car);
    CHECK(m.legs[0].route == std::vector<LinkId>{2, 3});
    CHECK(m.legs[1].route == std::vector<LinkId>{4, 1});
  }

  TEST_CASE("mode change is deterministic and needs an alternative") {
    const Network net = loop();
    const TravelTimeTable tt;
    const TollSchedule tolls(900);
    const Router router(net, tt, tolls);
    const Plan p = two_tours(Mode::pt);
    const std::vector<Mode> modes{Mode::pt, Mode::bicycle, Mode::walk};
    Rng a(11), b(11);
    CHECK(change_mode(p, modes, router, ScoringParams{}, 1.0, a) ==
          change_mode(p, modes, router, ScoringParams{}, 1.0, b));
    const std::vector<Mode> only{Mode::pt};
    Rng c(1);
    CHECK_THROWS_AS(change_mode(p, only, router, ScoringParams{}, 1.0, c), Error);
  }

  TEST_CASE("memory trimming") {
    Agent a = with_scores({1.0, 2.0, 3.0});
    trim_memory(a, 5);
    CHECK(a.plans.size() == 3);

    Agent b = with_scores({4.0, 1.0, 6.0, 2.0, 5.0, 3.0});
    b.selected = 2;
    trim_memory(b, 5);
    REQUIRE(b.plans.size() == 5);
    for (const Plan& p : b.plans) CHECK(*p.score != 1.0);
    CHECK(*b.selected_plan().score == 6.0);

    Agent c = with_scores({4.0, 1.0, 6.0, 2.0, 5.0, 3.0});
    c.selected = 1;
    trim_memory(c, 5);
    REQUIRE(c.plans.size() == 5);
    CHECK(*c.selected_plan().score == 1.0);
    for (std::size_t i = 0; i < c.plans.size(); ++i)
      if (i != c.selected) CHECK(*c.plans[i].score != 2.0);

    Agent d = with_scores({4.0, std::nullopt, 6.0, 2.0, 5.0, 3.0});
    d.selected = 5;
    trim_memory(d, 5);
    CHECK(!d.plans[1].score);  // unscored plans are kept
    CHECK(*d.selected_plan().score == 3.0);
  }
}
