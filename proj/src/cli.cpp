#include "tollsim/cli.hpp"

#include <fstream>

#include "tollsim/analysis.hpp"
#include "tollsim/csv.hpp"
#include "tollsim/error.hpp"
#include "tollsim/manifest.hpp"
#include "tollsim/taxmodel.hpp"

namespace tollsim::cli {

namespace fs = std::filesystem;

Json cmd_generate(const GenerateOptions& o) {
  SynthSpec spec;
  if (o.spec_file) {
    if (!fs::exists(*o.spec_file)) throw Error("spec file not found: " + o.spec_file->string());
    spec = synth_spec_from_json(read_json_file(*o.spec_file), o.spec_file->filename().string());
  }
  if (o.layout) {
    if (*o.layout == "corridor") {
      spec.layout = SynthLayout::corridor;
    } else if (*o.layout == "radial") {
      spec.layout = SynthLayout::radial;
    } else {
      throw ValidationError("arguments", "--layout", "layout", "expected corridor or radial");
    }
  }
  if (o.agents) spec.agents = *o.agents;
  Scenario s = generate_synthetic(spec, o.seed);
  s.config.scenario.rng_seed = o.seed;
  if (o.iterations) s.config.scenario.iterations = *o.iterations;
  validate(s.config);
  save_scenario(s, o.out);
  Json m{{"command", "generate"},
         {"spec", synth_spec_to_json(spec)},
         {"seed", o.seed},
         {"population_hash", population_hash(s.population)},
         {"config_hash", config_hash(s.config)}};
  write_manifest(o.out, m);
  return read_manifest(o.out);
}

Json cmd_run(const RunOptions& o) {
  Scenario base = load_scenario(o.scenario);
  const std::string input_hash = population_hash(base.population);
  Config& cfg = base.config;
  if (o.iterations) cfg.scenario.iterations = *o.iterations;
  if (o.seed) cfg.scenario.rng_seed = *o.seed;
  cfg.scenario = preset(o.kind, cfg.scenario);
  validate(cfg);

  tollsim::RunOptions ro;
  ro.output_dir = o.out;
  ro.initial_tolls = TollSchedule(cfg.tolling.interval_s);
  Json warm = nullptr;
  if (o.warm_start) {
    const Json prior = read_manifest(*o.warm_start);
    if (prior.value("command", "") != "run") throw Error("warm start needs a run directory: " + o.warm_start->string());
    const std::string prior_hash = prior.at("population_hash").get<std::string>();
    if (prior_hash != input_hash)
      throw Error("incompatible warm start: scenario population " + input_hash + " but " + o.warm_start->string() +
                  " ran population " + prior_hash);
    Scenario prior_out = load_scenario(*o.warm_start / "scenario");
    if (population_hash(prior_out.population) != input_hash)
      throw Error("incompatible warm start: output population of " + o.warm_start->string() + " does not match");
    base.population = std::move(prior_out.population);
    ro.first_iteration = prior.at("last_iteration").get<int>() + 1;
    const fs::path next = *o.warm_start / "next_tolls.csv";
    if (cfg.scenario.toll_enabled && fs::exists(next)) ro.initial_tolls = read_toll_schedule(next, cfg.tolling.interval_s);
    warm = o.warm_start->generic_string();
  }

  if (fs::exists(o.out) && !fs::is_empty(o.out))
    throw Error("output directory " + o.out.string() + " is not empty");
  fs::create_directories(o.out);
  const Network base_network = base.network;
  Scenario modified = apply_modifiers(base, cfg.scenario);
  RunResult result = run_loop(std::move(modified), ro);

  // the stored scenario keeps the unmodified network so that runs can be chained
  Scenario stored = std::move(result.scenario);
  stored.network = base_network;
  stored.config = cfg;
  save_scenario(stored, o.out / "scenario");

  const int last = result.stats.empty() ? ro.first_iteration - 1 : result.stats.back().iteration;
  Json m{{"command", "run"},
         {"scenario", o.scenario.generic_string()},
         {"kind", std::string(to_string(o.kind))},
         {"config_hash", config_hash(cfg)},
         {"seed", cfg.scenario.rng_seed},
         {"iterations", cfg.scenario.iterations},
         {"first_iteration", ro.first_iteration},
         {"last_iteration", last},
         {"capacity_multiplier", cfg.scenario.capacity_multiplier},
         {"pt_constant_multiplier", cfg.scenario.pt_constant_multiplier},
         {"toll_enabled", cfg.scenario.toll_enabled},
         {"population_hash", input_hash},
         {"warm_start", warm},
         {"output", o.out.generic_string()}};
  write_manifest(o.out, m);
  return read_manifest(o.out);
}

Json cmd_compare(const CompareOptions& o) {
  const analysis::RunData ref = analysis::load_run(o.reference);
  const analysis::RunData pol = analysis::load_run(o.policy);
  const std::string a = ref.manifest.at("population_hash").get<std::string>();
  const std::string b = pol.manifest.at("population_hash").get<std::string>();
  if (a != b) throw Error("population hash mismatch: reference " + a + " vs policy " + b);
  const analysis::Comparison c = analysis::compare_runs(ref, pol);
  analysis::write_reports(o.out, c);
  Json m{{"command", "compare"},
         {"reference", o.reference.generic_string()},
         {"policy", o.policy.generic_string()},
         {"population_hash", a}};
  write_manifest(o.out, m);
  return read_manifest(o.out);
}

Json cmd_tax(const TaxOptions& o) {
  tax::TaxInputs in = tax::load_tax_inputs(o.inputs);
  if (o.target_year) in.target_year = *o.target_year;
  if (o.baseline_first) in.baseline_first_year = *o.baseline_first;
  if (o.baseline_last) in.baseline_last_year = *o.baseline_last;
  const tax::TaxReport rep = tax::run_tax_model(in);
  fs::create_directories(o.out);
  tax::write_tax_report(o.out / "tax_report.csv", rep);
  Json m{{"command", "tax"},
         {"inputs", o.inputs.generic_string()},
         {"region", in.region},
         {"target_year", in.target_year},
         {"baseline_first_year", in.baseline_first_year},
         {"baseline_last_year", in.baseline_last_year},
         {"baseline_mean", rep.baseline_mean},
         {"target_total", rep.target_total},
         {"shortfall", rep.shortfall},
         {"fuel_tax_per_km", rep.fuel_tax_per_km},
         {"electricity_tax_per_km", rep.electricity_tax_per_km}};
  if (o.run) {
    const analysis::RunData run = analysis::load_run(*o.run);
    const Config& cfg = run.scenario.config;
    const analysis::Kpis daily = analysis::traffic_kpis(run.events, run.scenario.network, cfg.tolling.interval_s);
    const double revenue = analysis::upscale(daily.toll_revenue, 1.0 / cfg.scenario.sample_scale,
                                             cfg.analysis.days_per_year) *
                           cfg.analysis.monetary_cpi_factor;
    const double balance = revenue - rep.shortfall;
    std::ofstream f(o.out / "comparison.csv", std::ios::binary);
    f << "item,value\n";
    f << "annual_toll_revenue," << csv::fixed(revenue, 2) << '\n';
    f << "energy_tax_shortfall," << csv::fixed(rep.shortfall, 2) << '\n';
    f << "balance," << csv::fixed(balance, 2) << '\n';
    f << "status," << (balance >= 0.0 ? "surplus" : "deficit") << '\n';
    m["run"] = o.run->generic_string();
    m["annual_toll_revenue"] = revenue;
    m["status"] = balance >= 0.0 ? "surplus" : "deficit";
  }
  write_manifest(o.out, m);
  return read_manifest(o.out);
}

}  // namespace tollsim::cli
