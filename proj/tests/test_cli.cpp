#include <doctest.h>

#include "support.hpp"
#include "tollsim/cli.hpp"
#include "tollsim/error.hpp"
#include "tollsim/manifest.hpp"

using namespace tollsim;
namespace fs = std::filesystem;

namespace {

cli::GenerateOptions small(const fs::path& out, std::uint64_t seed = 4711) {
  cli::GenerateOptions g;
  g.agents = 120;
  g.seed = seed;
  g.iterations = 4;
  g.out = out;
  return g;
}

cli::RunOptions run_opts(const fs::path& scenario, const fs::path& out, ScenarioKind kind = ScenarioKind::reference) {
  cli::RunOptions r;
  r.scenario = scenario;
  r.kind = kind;
  r.out = out;
  return r;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("generate is reproducible") {
    const auto root = test::temp_dir("cli_gen");
    const Json a = cli::cmd_generate(small(root / "a"));
    const Json b = cli::cmd_generate(small(root / "b"));
    CHECK(a.at("checksums") == b.at("checksums"));
    CHECK(a.at("population_hash") == b.at("population_hash"));
    const Json c = cli::cmd_generate(small(root / "c", 1));
    CHECK(a.at("population_hash") != c.at("population_hash"));
    CHECK(load_scenario(root / "a").config.scenario.iterations == 4);
  }

  TEST_CASE("generate rejects bad arguments") {
    const auto root = test::temp_dir("cli_gen_bad");
    auto g = small(root / "x");
    g.agents = 0;
    CHECK_THROWS_AS(cli::cmd_generate(g), ValidationError);
    g = small(root / "y");
    g.layout = "grid";
    CHECK_THROWS_AS(cli::cmd_generate(g), ValidationError);
    g = small(root / "z");
    g.spec_file = root / "missing.json";
    CHECK_THROWS_AS(cli::cmd_generate(g), Error);
  }

  TEST_CASE("generate, run, warm start, compare and tax") {
    const auto root = test::temp_dir("cli_pipeline");
    cli::cmd_generate(small(root / "scenario"));
    const Json ref = cli::cmd_run(run_opts(root / "scenario", root / "ref"));
    CHECK(ref.at("last_iteration") == 4);
    CHECK(ref.at("toll_enabled") == false);
    for (const char* f : {"events.csv", "iterations.csv", "scorestats.csv", "scenario/population.json"})
      CHECK(ref.at("checksums").contains(f));

    auto warm = run_opts(root / "scenario", root / "toll", ScenarioKind::congestion_plus);
    warm.warm_start = root / "ref";
    warm.iterations = 3;
    const Json pol = cli::cmd_run(warm);
    CHECK(pol.at("first_iteration") == 5);
    CHECK(pol.at("last_iteration") == 7);
    CHECK(pol.at("capacity_multiplier") == 1.1);
    CHECK(pol.at("population_hash") == ref.at("population_hash"));
    // the stored network is the unmodified one
    CHECK(load_scenario(root / "toll" / "scenario").network == load_scenario(root / "scenario").network);

    cli::CompareOptions c{root / "ref", root / "toll", root / "cmp"};
    cli::cmd_compare(c);
    for (const char* f : {"kpis.csv", "shifts.csv", "deciles.csv", "zones.csv", "welfare.csv"})
      CHECK(fs::exists(root / "cmp" / f));

    cli::TaxOptions t;
    t.inputs = fs::path(TOLLSIM_DATA_DIR) / "tax" / "flat";
    t.run = root / "toll";
    t.out = root / "tax";
    const Json tm = cli::cmd_tax(t);
    CHECK(tm.at("shortfall") == 0.0);
    CHECK(tm.at("status") == "surplus");
    CHECK(test::slurp(root / "tax" / "comparison.csv").find("balance,") != std::string::npos);
  }

  TEST_CASE("identical seeds give byte-identical outputs") {
    const auto root = test::temp_dir("cli_det");
    cli::cmd_generate(small(root / "scenario"));
    const Json a = cli::cmd_run(run_opts(root / "scenario", root / "a", ScenarioKind::congestion));
    const Json b = cli::cmd_run(run_opts(root / "scenario", root / "b", ScenarioKind::congestion));
    CHECK(a.at("checksums") == b.at("checksums"));
    CHECK(test::slurp(root / "a" / "events.csv") == test::slurp(root / "b" / "events.csv"));
  }

  TEST_CASE("refusals") {
    const auto root = test::temp_dir("cli_refuse");
    cli::cmd_generate(small(root / "s1"));
    cli::cmd_generate(small(root / "s2", 99));
    cli::cmd_run(run_opts(root / "s1", root / "r1"));
    cli::cmd_run(run_opts(root / "s2", root / "r2"));

    // output directory already holds a run
    CHECK_THROWS_AS(cli::cmd_run(run_opts(root / "s1", root / "r1")), Error);

    // warm start from a different population
    auto w = run_opts(root / "s1", root / "w");
    w.warm_start = root / "r2";
    CHECK_THROWS_AS(cli::cmd_run(w), Error);
    // warm start from something that is not a run
    w.warm_start = root / "s1";
    CHECK_THROWS_AS(cli::cmd_run(w), Error);

    // comparing runs of different populations names both hashes
    try {
      cli::cmd_compare(cli::CompareOptions{root / "r1", root / "r2", root / "cmp"});
      FAIL("expected a population mismatch");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find(read_manifest(root / "r1").at("population_hash").get<std::string>()) != std::string::npos);
      CHECK(msg.find(read_manifest(root / "r2").at("population_hash").get<std::string>()) != std::string::npos);
    }
  }
}
