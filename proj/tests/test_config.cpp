#include <doctest.h>

#include "tollsim/config.hpp"
#include "tollsim/error.hpp"

using namespace tollsim;

namespace {

std::string failing_field(const Json& patch) {
  Json j = to_json(Config{});
  j.merge_patch(patch);
  try {
    config_from_json(j);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const Config c;
    CHECK(c.scenario.sample_scale == 0.1);
    CHECK(c.scenario.innovation_fraction == 0.8);
    CHECK(c.strategy.w_select == 0.7);
    CHECK(c.strategy.memory_max == 5);
    CHECK(c.strategy.temperature == 1.0);
    CHECK(c.tolling.interval_s == 900);
    CHECK(c.tolling.d_min_s == 1.0);
    CHECK(c.scoring.beta_perf == 6.0);
    CHECK(c.scoring.beta_late == -18.0);
    CHECK(c.scoring.beta_trav[index(Mode::pt)] == -3.0);
    CHECK(c.scoring.constant[index(Mode::pt)] == -2.0);
    CHECK(c.mobsim.teleport[index(Mode::walk)].speed == 1.25);
    CHECK_NOTHROW(validate(c));
  }

  TEST_CASE("json round trip") {
    Config c;
    c.scenario.iterations = 42;
    c.scenario.rng_seed = 123456789012345ULL;
    c.scoring.population_average_income = 31000.0;
    c.scoring.constant[index(Mode::bicycle)] = -0.75;
    c.mobsim.toll_exempt[index(Mode::freight)] = true;
    c.mobsim.teleport[index(Mode::pt)].speed = 9.5;
    c.tolling.k_p = 0.0125;
    c.strategy.mutation_range_s = 600;
    c.analysis.monetary_cpi_factor = 1.4146;
    const Config back = config_from_json(to_json(c));
    CHECK(to_json(back) == to_json(c));
    CHECK(back.scenario.rng_seed == 123456789012345ULL);
    CHECK(*back.scoring.population_average_income == 31000.0);
  }

  TEST_CASE("missing keys keep defaults") {
    const Config c = config_from_json(Json{{"tolling", {{"k_p", 0.02}}}});
    CHECK(c.tolling.k_p == 0.02);
    CHECK(c.tolling.interval_s == 900);
    CHECK(c.scenario.iterations == Config{}.scenario.iterations);
  }

  TEST_CASE("invalid values name the field") {
    CHECK(failing_field({{"scenario", {{"sample_scale", 0.0}}}}) == "sample_scale");
    CHECK(failing_field({{"scenario", {{"sample_scale", 1.5}}}}) == "sample_scale");
    CHECK(failing_field({{"scenario", {{"iterations", 0}}}}) == "iterations");
    CHECK(failing_field({{"scenario", {{"innovation_fraction", 1.1}}}}) == "innovation_fraction");
    CHECK(failing_field({{"scoring", {{"beta_m", 0.0}}}}) == "beta_m");
    CHECK(failing_field({{"scoring", {{"beta_short", -1.0}}}}) == "beta_short");
    CHECK(failing_field({{"tolling", {{"interval_s", 7}}}}) == "interval_s");
    CHECK(failing_field({{"tolling", {{"k_p", -0.1}}}}) == "k_p");
    CHECK(failing_field({{"tolling", {{"smoothing", 0.0}}}}) == "smoothing");
    CHECK(failing_field({{"strategy", {{"temperature", 0.0}}}}) == "temperature");
    CHECK(failing_field({{"strategy", {{"memory_max", 0}}}}) == "memory_max");
    CHECK(failing_field({{"analysis", {{"days_per_year", 0.0}}}}) == "days_per_year");
    CHECK(failing_field({{"scenario", {{"toll_enabled", true}}}}).empty());
  }

  TEST_CASE("wrong types and versions are rejected") {
    CHECK_THROWS_AS(config_from_json(Json::array()), ValidationError);
    CHECK_THROWS_AS(config_from_json(Json{{"schema_version", 99}}), ValidationError);
    CHECK_THROWS_AS(config_from_json(Json{{"scenario", {{"iterations", "ten"}}}}), ValidationError);
    CHECK_THROWS_AS(config_from_json(Json{{"mobsim", {{"teleport", {{"car", {{"speed", 3.0}}}}}}}}), ValidationError);
    CHECK_THROWS_AS(config_from_json(Json{{"mobsim", {{"toll_exempt", {{"car", 1}}}}}}), ValidationError);
  }
}
