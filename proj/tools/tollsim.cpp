// Command-line front end: generate, run, compare, tax.
#include <iostream>

#include <CLI11.hpp>

#include "tollsim/cli.hpp"
#include "tollsim/error.hpp"

namespace fs = std::filesystem;
using namespace tollsim;

int main(int argc, char** argv) {
  CLI::App app{"Agent-based congestion toll simulation and energy-tax projection"};
  app.require_subcommand(1);

  cli::GenerateOptions gen;
  std::string spec_file;
  auto* g = app.add_subcommand("generate", "Write a synthetic scenario directory");
  g->add_option("--spec", spec_file, "Synthetic spec (JSON)")->check(CLI::ExistingFile);
  g->add_option("--layout", gen.layout, "corridor or radial (overrides the spec)");
  g->add_option("--agents", gen.agents, "Number of agents (overrides the spec)");
  g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  g->add_option("--iterations", gen.iterations, "Iterations stored in the scenario config");
  g->add_option("--out", gen.out, "Output directory")->required();

  cli::RunOptions run;
  std::string kind = "reference";
  std::string warm;
  auto* r = app.add_subcommand("run", "Run the iterative simulation");
  r->add_option("--scenario", run.scenario, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  r->add_option("--kind", kind, "reference, congestion or congestion_plus")
      ->check(CLI::IsMember({"reference", "congestion", "congestion_plus"}))
      ->capture_default_str();
  r->add_option("--iterations", run.iterations, "Iterations (default: scenario config)");
  r->add_option("--seed", run.seed, "Random seed (default: scenario config)");
  r->add_option("--warm-start", warm, "Continue from a previous run directory")->check(CLI::ExistingDirectory);
  r->add_option("--out", run.out, "Output directory")->required();

  cli::CompareOptions cmp;
  auto* c = app.add_subcommand("compare", "Compare a policy run against a reference run");
  c->add_option("--reference", cmp.reference, "Reference run directory")->required()->check(CLI::ExistingDirectory);
  c->add_option("--policy", cmp.policy, "Policy run directory")->required()->check(CLI::ExistingDirectory);
  c->add_option("--out", cmp.out, "Report directory")->required();

  cli::TaxOptions tx;
  std::string tax_run;
  auto* t = app.add_subcommand("tax", "Project energy taxes and the shortfall");
  t->add_option("--inputs", tx.inputs, "Tax input table directory")->required()->check(CLI::ExistingDirectory);
  t->add_option("--target-year", tx.target_year, "Target year (default: tax.json)");
  t->add_option("--baseline-first", tx.baseline_first, "First baseline year (default: tax.json)");
  t->add_option("--baseline-last", tx.baseline_last, "Last baseline year (default: tax.json)");
  t->add_option("--run", tax_run, "Run directory whose toll revenue is compared")->check(CLI::ExistingDirectory);
  t->add_option("--out", tx.out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    Json manifest;
    if (*g) {
      if (!spec_file.empty()) gen.spec_file = spec_file;
      manifest = cli::cmd_generate(gen);
    } else if (*r) {
      run.kind = *parse_scenario_kind(kind);
      if (!warm.empty()) run.warm_start = warm;
      manifest = cli::cmd_run(run);
    } else if (*c) {
      manifest = cli::cmd_compare(cmp);
    } else if (*t) {
      if (!tax_run.empty()) tx.run = tax_run;
      manifest = cli::cmd_tax(tx);
    }
    manifest.erase("checksums");
    std::cout << manifest.dump(2) << '\n';
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
