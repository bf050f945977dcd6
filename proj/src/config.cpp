#include "tollsim/config.hpp"

#include <cmath>

#include "tollsim/error.hpp"

namespace tollsim {
namespace {

Json per_mode_to_json(const PerMode<double>& v) {
  Json j = Json::object();
  for (Mode m : kAllModes) j[std::string(to_string(m))] = v[index(m)];
  return j;
}

class Reader {
 public:
  Reader(const Json& j, std::string file, std::string record)
      : j_(j), file_(std::move(file)), record_(std::move(record)) {}

  template <typename T>
  void get(const char* key, T& out) const {
    if (!j_.contains(key)) return;
    const Json& v = j_.at(key);
    try {
      out = v.get<T>();
    } catch (const Json::exception& e) {
      throw ValidationError(file_, record_, key, std::string("wrong type: ") + e.what());
    }
  }

  void get(const char* key, std::optional<double>& out) const {
    if (!j_.contains(key) || j_.at(key).is_null()) return;
    double v = 0.0;
    get(key, v);
    out = v;
  }

  void get_per_mode(const char* key, PerMode<double>& out) const {
    if (!j_.contains(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_object()) throw ValidationError(file_, record_, key, "expected object keyed by mode");
    for (auto it = v.begin(); it != v.end(); ++it) {
      auto mode = parse_mode(it.key());
      if (!mode) throw ValidationError(file_, record_, std::string(key) + "." + it.key(), "unknown mode");
      if (!it.value().is_number())
        throw ValidationError(file_, record_, std::string(key) + "." + it.key(), "expected number");
      out[index(*mode)] = it.value().get<double>();
    }
  }

  Reader child(const char* key) const {
    static const Json kEmpty = Json::object();
    if (!j_.contains(key)) return Reader(kEmpty, file_, key);
    if (!j_.at(key).is_object()) throw ValidationError(file_, record_, key, "expected object");
    return Reader(j_.at(key), file_, key);
  }

  const Json& raw() const { return j_; }
  const std::string& file() const { return file_; }

 private:
  const Json& j_;
  std::string file_;
  std::string record_;
};

void require(bool ok, const std::string& file, const char* record, const char* field, const char* what) {
  if (!ok) throw ValidationError(file, record, field, what);
}

}  // namespace

void validate(const Config& cfg, const std::string& file) {
  const auto& s = cfg.scenario;
  require(s.sample_scale > 0.0 && s.sample_scale <= 1.0, file, "scenario", "sample_scale", "must be in (0,1]");
  require(s.capacity_multiplier > 0.0 && std::isfinite(s.capacity_multiplier), file, "scenario",
          "capacity_multiplier", "must be > 0");
  require(s.pt_constant_multiplier > 0.0 && std::isfinite(s.pt_constant_multiplier), file, "scenario",
          "pt_constant_multiplier", "must be > 0");
  require(s.iterations >= 1, file, "scenario", "iterations", "must be >= 1");
  require(s.innovation_fraction >= 0.0 && s.innovation_fraction <= 1.0, file, "scenario",
          "innovation_fraction", "must be in [0,1]");

  const auto& p = cfg.scoring;
  require(p.beta_m > 0.0, file, "scoring", "beta_m", "must be > 0");
  require(p.beta_short == 0.0, file, "scoring", "beta_short", "must be 0");
  require(p.zeta_hours > 0.0, file, "scoring", "zeta_hours", "must be > 0");
  require(p.min_duration_s > 0.0, file, "scoring", "min_duration_s", "must be > 0");
  if (p.population_average_income)
    require(*p.population_average_income > 0.0, file, "scoring", "population_average_income", "must be > 0");

  const auto& m = cfg.mobsim;
  require(m.cell_length > 0.0, file, "mobsim", "cell_length", "must be > 0");
  require(m.stuck_time_s > 0, file, "mobsim", "stuck_time_s", "must be > 0");
  for (Mode mode : kAllModes) {
    if (!is_teleported(mode)) continue;
    require(m.teleport[index(mode)].speed > 0.0, file, "mobsim", "teleport.speed", "must be > 0");
    require(m.teleport[index(mode)].beeline_factor > 0.0, file, "mobsim", "teleport.beeline_factor",
            "must be > 0");
  }

  const auto& t = cfg.tolling;
  require(t.interval_s > 0 && 86400 % t.interval_s == 0, file, "tolling", "interval_s",
          "must be a positive divisor of 86400");
  require(t.k_p >= 0.0, file, "tolling", "k_p", "must be >= 0");
  require(t.d_min_s >= 0.0, file, "tolling", "d_min_s", "must be >= 0");
  require(t.smoothing > 0.0 && t.smoothing <= 1.0, file, "tolling", "smoothing", "must be in (0,1]");

  const auto& g = cfg.strategy;
  require(g.w_select >= 0 && g.w_reroute >= 0 && g.w_time_mutate >= 0 && g.w_mode_change >= 0, file,
          "strategy", "weights", "must be >= 0");
  require(g.w_select + g.w_reroute + g.w_time_mutate + g.w_mode_change > 0.0, file, "strategy", "weights",
          "must not all be 0");
  require(g.mutation_range_s >= 0, file, "strategy", "mutation_range_s", "must be >= 0");
  require(g.temperature > 0.0, file, "strategy", "temperature", "must be > 0");
  require(g.memory_max >= 1, file, "strategy", "memory_max", "must be >= 1");

  const auto& a = cfg.analysis;
  require(a.departure_shift_threshold_s >= 0.0, file, "analysis", "departure_shift_threshold_s", "must be >= 0");
  require(a.ef_km_g >= 0.0 && a.ef_hour_kg >= 0.0, file, "analysis", "emission factors", "must be >= 0");
  require(a.days_per_year > 0.0, file, "analysis", "days_per_year", "must be > 0");
  require(a.monetary_cpi_factor > 0.0, file, "analysis", "monetary_cpi_factor", "must be > 0");
}

Json to_json(const Config& cfg) {
  Json j;
  j["schema_version"] = kConfigSchemaVersion;
  const auto& s = cfg.scenario;
  j["scenario"] = {{"sample_scale", s.sample_scale},
                   {"capacity_multiplier", s.capacity_multiplier},
                   {"pt_constant_multiplier", s.pt_constant_multiplier},
                   {"iterations", s.iterations},
                   {"innovation_fraction", s.innovation_fraction},
                   {"rng_seed", s.rng_seed},
                   {"toll_enabled", s.toll_enabled}};
  const auto& p = cfg.scoring;
  j["scoring"] = {{"beta_perf", p.beta_perf},
                  {"beta_wait", p.beta_wait},
                  {"beta_late", p.beta_late},
                  {"beta_early", p.beta_early},
                  {"beta_short", p.beta_short},
                  {"zeta_hours", p.zeta_hours},
                  {"min_duration_s", p.min_duration_s},
                  {"short_penalty", p.short_penalty},
                  {"beta_m", p.beta_m},
                  {"beta_transfer", p.beta_transfer},
                  {"beta_trav", per_mode_to_json(p.beta_trav)},
                  {"constant", per_mode_to_json(p.constant)},
                  {"beta_d", per_mode_to_json(p.beta_d)},
                  {"gamma_d", per_mode_to_json(p.gamma_d)},
                  {"population_average_income",
                   p.population_average_income ? Json(*p.population_average_income) : Json(nullptr)}};
  const auto& m = cfg.mobsim;
  Json teleport = Json::object();
  Json exempt = Json::object();
  for (Mode mode : kAllModes) {
    if (is_teleported(mode)) {
      teleport[std::string(to_string(mode))] = {{"speed", m.teleport[index(mode)].speed},
                                                {"beeline_factor", m.teleport[index(mode)].beeline_factor}};
    }
    exempt[std::string(to_string(mode))] = m.toll_exempt[index(mode)];
  }
  j["mobsim"] = {{"cell_length", m.cell_length},
                 {"stuck_time_s", m.stuck_time_s},
                 {"teleport", teleport},
                 {"toll_exempt", exempt}};
  const auto& t = cfg.tolling;
  j["tolling"] = {{"interval_s", t.interval_s},
                  {"k_p", t.k_p},
                  {"d_min_s", t.d_min_s},
                  {"smoothing", t.smoothing}};
  const auto& g = cfg.strategy;
  j["strategy"] = {{"w_select", g.w_select},
                   {"w_reroute", g.w_reroute},
                   {"w_time_mutate", g.w_time_mutate},
                   {"w_mode_change", g.w_mode_change},
                   {"mutation_range_s", g.mutation_range_s},
                   {"temperature", g.temperature},
                   {"memory_max", g.memory_max}};
  const auto& a = cfg.analysis;
  j["analysis"] = {{"departure_shift_threshold_s", a.departure_shift_threshold_s},
                   {"ef_km_g", a.ef_km_g},
                   {"ef_hour_kg", a.ef_hour_kg},
                   {"days_per_year", a.days_per_year},
                   {"monetary_cpi_factor", a.monetary_cpi_factor}};
  return j;
}

Config config_from_json(const Json& j, const std::string& file) {
  if (!j.is_object()) throw ValidationError(file, "document", "root", "expected object");
  if (j.contains("schema_version") && j.at("schema_version") != kConfigSchemaVersion)
    throw ValidationError(file, "document", "schema_version", "unsupported version");

  Config cfg;
  Reader root(j, file, "document");

  auto s = root.child("scenario");
  s.get("sample_scale", cfg.scenario.sample_scale);
  s.get("capacity_multiplier", cfg.scenario.capacity_multiplier);
  s.get("pt_constant_multiplier", cfg.scenario.pt_constant_multiplier);
  s.get("iterations", cfg.scenario.iterations);
  s.get("innovation_fraction", cfg.scenario.innovation_fraction);
  s.get("rng_seed", cfg.scenario.rng_seed);
  s.get("toll_enabled", cfg.scenario.toll_enabled);

  auto p = root.child("scoring");
  p.get("beta_perf", cfg.scoring.beta_perf);
  p.get("beta_wait", cfg.scoring.beta_wait);
  p.get("beta_late", cfg.scoring.beta_late);
  p.get("beta_early", cfg.scoring.beta_early);
  p.get("beta_short", cfg.scoring.beta_short);
  p.get("zeta_hours", cfg.scoring.zeta_hours);
  p.get("min_duration_s", cfg.scoring.min_duration_s);
  p.get("short_penalty", cfg.scoring.short_penalty);
  p.get("beta_m", cfg.scoring.beta_m);
  p.get("beta_transfer", cfg.scoring.beta_transfer);
  p.get_per_mode("beta_trav", cfg.scoring.beta_trav);
  p.get_per_mode("constant", cfg.scoring.constant);
  p.get_per_mode("beta_d", cfg.scoring.beta_d);
  p.get_per_mode("gamma_d", cfg.scoring.gamma_d);
  p.get("population_average_income", cfg.scoring.population_average_income);

  auto m = root.child("mobsim");
  m.get("cell_length", cfg.mobsim.cell_length);
  m.get("stuck_time_s", cfg.mobsim.stuck_time_s);
  if (m.raw().contains("teleport")) {
    const Json& tp = m.raw().at("teleport");
    if (!tp.is_object()) throw ValidationError(file, "mobsim", "teleport", "expected object");
    for (auto it = tp.begin(); it != tp.end(); ++it) {
      auto mode = parse_mode(it.key());
      if (!mode || !is_teleported(*mode))
        throw ValidationError(file, "mobsim", "teleport." + it.key(), "not a teleported mode");
      Reader r(it.value(), file, "mobsim.teleport." + it.key());
      r.get("speed", cfg.mobsim.teleport[index(*mode)].speed);
      r.get("beeline_factor", cfg.mobsim.teleport[index(*mode)].beeline_factor);
    }
  }
  if (m.raw().contains("toll_exempt")) {
    const Json& ex = m.raw().at("toll_exempt");
    if (!ex.is_object()) throw ValidationError(file, "mobsim", "toll_exempt", "expected object");
    for (auto it = ex.begin(); it != ex.end(); ++it) {
      auto mode = parse_mode(it.key());
      if (!mode || !it.value().is_boolean())
        throw ValidationError(file, "mobsim", "toll_exempt." + it.key(), "expected mode: bool");
      cfg.mobsim.toll_exempt[index(*mode)] = it.value().get<bool>();
    }
  }

  auto t = root.child("tolling");
  t.get("interval_s", cfg.tolling.interval_s);
  t.get("k_p", cfg.tolling.k_p);
  t.get("d_min_s", cfg.tolling.d_min_s);
  t.get("smoothing", cfg.tolling.smoothing);

  auto g = root.child("strategy");
  g.get("w_select", cfg.strategy.w_select);
  g.get("w_reroute", cfg.strategy.w_reroute);
  g.get("w_time_mutate", cfg.strategy.w_time_mutate);
  g.get("w_mode_change", cfg.strategy.w_mode_change);
  g.get("mutation_range_s", cfg.strategy.mutation_range_s);
  g.get("temperature", cfg.strategy.temperature);
  g.get("memory_max", cfg.strategy.memory_max);

  auto a = root.child("analysis");
  a.get("departure_shift_threshold_s", cfg.analysis.departure_shift_threshold_s);
  a.get("ef_km_g", cfg.analysis.ef_km_g);
  a.get("ef_hour_kg", cfg.analysis.ef_hour_kg);
  a.get("days_per_year", cfg.analysis.days_per_year);
  a.get("monetary_cpi_factor", cfg.analysis.monetary_cpi_factor);

  validate(cfg, file);
  return cfg;
}

}  // namespace tollsim
