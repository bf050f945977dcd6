#include "tollsim/taxmodel.hpp"

#include <fstream>
#include <set>

#include "tollsim/csv.hpp"
#include "tollsim/error.hpp"
#include "tollsim/scenario.hpp"

namespace tollsim::tax {

namespace fs = std::filesystem;

namespace {
constexpr std::array<std::string_view, kClassCount> kNames = {"ICE_petrol", "ICE_diesel", "HEV_petrol",
                                                              "HEV_diesel", "PHEV",       "BEV"};
}

std::string_view to_string(Powertrain c) noexcept { return kNames[index(c)]; }

std::optional<Powertrain> parse_powertrain(std::string_view s) noexcept {
  for (Powertrain c : kAllClasses) {
    if (kNames[index(c)] == s) return c;
  }
  return std::nullopt;
}

namespace {

void apply_trajectories(FleetYear& fy, const Trajectories& t) {
  auto m = t.avg_mileage.find(fy.year);
  auto f = t.avg_fuel.find(fy.year);
  auto e = t.avg_e.find(fy.year);
  for (Powertrain c : kAllClasses) {
    ClassYear& cy = fy.classes[index(c)];
    if (m != t.avg_mileage.end()) cy.avg_mileage = m->second[index(c)];
    if (f != t.avg_fuel.end()) cy.avg_fuel = f->second[index(c)];
    if (e != t.avg_e.end()) cy.avg_e = e->second[index(c)];
  }
}

}  // namespace

std::vector<FleetYear> project_stocks(const FleetYear& base, const std::map<int, PerClass<double>>& growth, int horizon,
                                      const Trajectories& traj) {
  std::vector<FleetYear> out;
  FleetYear cur = base;
  for (int y = base.year + 1; y <= horizon; ++y) {
    FleetYear next = cur;
    next.year = y;
    auto g = growth.find(y);
    for (Powertrain c : kAllClasses) {
      const double rate = g == growth.end() ? 0.0 : g->second[index(c)];
      if (rate < -1.0)
        throw Error("growth rate below -100% for " + std::string(to_string(c)) + " in " + std::to_string(y));
      next.classes[index(c)].car_stock = cur.classes[index(c)].car_stock * (1.0 + rate);
    }
    apply_trajectories(next, traj);
    out.push_back(next);
    cur = next;
  }
  return out;
}

double annual_mileage(const FleetYear& fy, Powertrain c) {
  const ClassYear& cy = fy.classes[index(c)];
  return cy.car_stock * cy.avg_mileage;
}

namespace {
double fuel_share(Powertrain c, const SplitParams& s) {
  if (!fuel_taxable(c)) return 0.0;
  return c == Powertrain::PHEV ? 1.0 - s.phev_electric_share : 1.0;
}
double electric_share(Powertrain c, const SplitParams& s) {
  if (!grid_charged(c)) return 0.0;
  return c == Powertrain::PHEV ? s.phev_electric_share : 1.0;
}
}  // namespace

double fuel_tax_class(const FleetYear& fy, Powertrain c, const TaxRates& r, const SplitParams& s) {
  if (!fuel_taxable(c)) return 0.0;
  return r.fuel_tax_rate[index(c)] * annual_mileage(fy, c) * fuel_share(c, s) * fy.classes[index(c)].avg_fuel;
}

double electricity_tax_class(const FleetYear& fy, Powertrain c, const TaxRates& r, const SplitParams& s) {
  if (!grid_charged(c)) return 0.0;
  return r.e_tax_rate * annual_mileage(fy, c) * electric_share(c, s) * fy.classes[index(c)].avg_e;
}

double fuel_tax(const FleetYear& fy, const TaxRates& r, const SplitParams& s) {
  double sum = 0.0;
  for (Powertrain c : kAllClasses) sum += fuel_tax_class(fy, c, r, s);
  return sum;
}

double electricity_tax(const FleetYear& fy, const TaxRates& r, const SplitParams& s) {
  double sum = 0.0;
  for (Powertrain c : kAllClasses) sum += electricity_tax_class(fy, c, r, s);
  return sum;
}

double fuel_km(const FleetYear& fy, const SplitParams& s) {
  double km = 0.0;
  for (Powertrain c : kAllClasses) km += annual_mileage(fy, c) * fuel_share(c, s);
  return km;
}

double electric_km(const FleetYear& fy, const SplitParams& s) {
  double km = 0.0;
  for (Powertrain c : kAllClasses) km += annual_mileage(fy, c) * electric_share(c, s);
  return km;
}

double cpi_adjust(double value, int from_year, int to_year, const TaxRates& r) {
  auto from = r.cpi.find(from_year);
  auto to = r.cpi.find(to_year);
  if (from == r.cpi.end()) throw Error("no CPI entry for " + std::to_string(from_year));
  if (to == r.cpi.end()) throw Error("no CPI entry for " + std::to_string(to_year));
  if (from_year == to_year) return value;
  return value * to->second / from->second;
}

double shortfall(const std::map<int, double>& series, int first, int last, int target) {
  if (first > last) throw Error("empty baseline window");
  double sum = 0.0;
  for (int y = first; y <= last; ++y) {
    auto it = series.find(y);
    if (it == series.end()) throw Error("baseline year " + std::to_string(y) + " outside the series");
    sum += it->second;
  }
  auto t = series.find(target);
  if (t == series.end()) throw Error("target year " + std::to_string(target) + " outside the series");
  return sum / (last - first + 1) - t->second;
}

// --- input tables -------------------------------------------------------------------------

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Table read_table(const fs::path& path) {
  const std::string file = path.filename().string();
  std::ifstream in(path);
  if (!in) throw ValidationError(file, "document", "file", "missing file " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(file, "header", "columns", "empty file");
  for (auto c : csv::split(line)) t.header.emplace_back(c);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    for (auto c : csv::split(line)) cells.emplace_back(c);
    if (cells.size() != t.header.size())
      throw ValidationError(file, "row " + std::to_string(row), "columns",
                            "expected " + std::to_string(t.header.size()) + " columns");
    t.rows.push_back(std::move(cells));
  }
  return t;
}

/// year,<class>,<class>... ; classes not listed stay 0.
std::map<int, PerClass<double>> read_year_table(const fs::path& path, bool allow_negative = false) {
  const std::string file = path.filename().string();
  const Table t = read_table(path);
  if (t.header.empty() || t.header[0] != "year") throw ValidationError(file, "header", "year", "first column must be year");
  std::vector<Powertrain> cols;
  for (std::size_t i = 1; i < t.header.size(); ++i) {
    auto c = parse_powertrain(t.header[i]);
    if (!c) throw ValidationError(file, "header", t.header[i], "unknown powertrain class");
    cols.push_back(*c);
  }
  std::map<int, PerClass<double>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string rec = "row " + std::to_string(r + 2);
    const int year = csv::parse<int>(t.rows[r][0], file, rec, "year");
    PerClass<double> v{};
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const double x = csv::parse<double>(t.rows[r][i + 1], file, rec, t.header[i + 1]);
      if (!allow_negative && x < 0.0) throw ValidationError(file, rec, t.header[i + 1], "must be >= 0");
      v[index(cols[i])] = x;
    }
    if (!out.emplace(year, v).second) throw ValidationError(file, rec, "year", "duplicate year");
  }
  return out;
}

}  // namespace

TaxInputs load_tax_inputs(const fs::path& dir) {
  TaxInputs in;
  const Json cfg = read_json_file(dir / "tax.json");
  const std::string file = "tax.json";
  auto get_int = [&](const char* key, int& out) {
    if (!cfg.contains(key)) return;
    if (!cfg.at(key).is_number_integer()) throw ValidationError(file, "document", key, "expected an integer");
    out = cfg.at(key).get<int>();
  };
  if (cfg.contains("region")) in.region = cfg.at("region").get<std::string>();
  get_int("reference_year", in.reference_year);
  get_int("target_year", in.target_year);
  get_int("baseline_first_year", in.baseline_first_year);
  get_int("baseline_last_year", in.baseline_last_year);
  if (cfg.contains("phev_electric_share")) {
    const double u = cfg.at("phev_electric_share").get<double>();
    if (!(u >= 0.0 && u <= 1.0)) throw ValidationError(file, "document", "phev_electric_share", "must be in [0, 1]");
    in.split.phev_electric_share = u;
  }

  const auto stocks = read_year_table(dir / "stocks.csv");
  in.growth = read_year_table(dir / "growth.csv", true);
  in.trajectories.avg_mileage = read_year_table(dir / "mileage.csv");
  in.trajectories.avg_fuel = read_year_table(dir / "fuel_consumption.csv");
  in.trajectories.avg_e = read_year_table(dir / "electricity_consumption.csv");
  if (stocks.empty()) throw ValidationError("stocks.csv", "document", "rows", "no stock rows");
  for (const auto& [year, v] : stocks) {
    FleetYear fy;
    fy.year = year;
    for (Powertrain c : kAllClasses) fy.classes[index(c)].car_stock = v[index(c)];
    if (!in.trajectories.avg_mileage.contains(year))
      throw ValidationError("mileage.csv", "year " + std::to_string(year), "year", "missing row for a stock year");
    apply_trajectories(fy, in.trajectories);
    in.history.push_back(fy);
  }

  const Table rates = read_table(dir / "rates.csv");
  for (std::size_t r = 0; r < rates.rows.size(); ++r) {
    const std::string rec = "row " + std::to_string(r + 2);
    const std::string& key = rates.rows[r][0];
    const double v = csv::parse<double>(rates.rows[r][1], "rates.csv", rec, "fuel_tax_rate");
    if (v < 0.0) throw ValidationError("rates.csv", rec, key, "must be >= 0");
    if (key == "electricity") {
      in.rates.e_tax_rate = v;
    } else if (auto c = parse_powertrain(key); c && fuel_taxable(*c)) {
      in.rates.fuel_tax_rate[index(*c)] = v;
    } else {
      throw ValidationError("rates.csv", rec, "class", "unknown fuel class " + key);
    }
  }
  const Table cpi = read_table(dir / "cpi.csv");
  for (std::size_t r = 0; r < cpi.rows.size(); ++r) {
    const std::string rec = "row " + std::to_string(r + 2);
    const int year = csv::parse<int>(cpi.rows[r][0], "cpi.csv", rec, "year");
    const double v = csv::parse<double>(cpi.rows[r][1], "cpi.csv", rec, "cpi");
    if (!(v > 0.0)) throw ValidationError("cpi.csv", rec, "cpi", "must be > 0");
    in.rates.cpi[year] = v;
  }
  return in;
}

TaxReport run_tax_model(const TaxInputs& in) {
  if (in.history.empty()) throw Error("tax model needs at least one observed year");
  std::vector<FleetYear> years = in.history;
  const auto projected = project_stocks(in.history.back(), in.growth, in.target_year, in.trajectories);
  const int last_observed = in.history.back().year;
  years.insert(years.end(), projected.begin(), projected.end());

  TaxReport rep;
  std::map<int, double> real;
  for (const FleetYear& fy : years) {
    TaxYear t;
    t.year = fy.year;
    t.projected = fy.year > last_observed;
    for (Powertrain c : kAllClasses) t.stock[index(c)] = fy.classes[index(c)].car_stock;
    t.fuel_tax = fuel_tax(fy, in.rates, in.split);
    t.electricity_tax = electricity_tax(fy, in.rates, in.split);
    t.total = t.fuel_tax + t.electricity_tax;
    t.total_real = cpi_adjust(t.total, fy.year, in.reference_year, in.rates);
    t.fuel_km = fuel_km(fy, in.split);
    t.electric_km = electric_km(fy, in.split);
    real[fy.year] = t.total_real;
    rep.years.push_back(t);
  }
  rep.target_total = real.at(in.target_year);
  rep.shortfall = shortfall(real, in.baseline_first_year, in.baseline_last_year, in.target_year);
  rep.baseline_mean = rep.shortfall + rep.target_total;
  const TaxYear& target = rep.years.back();
  rep.fuel_tax_per_km = target.fuel_km > 0.0 ? target.fuel_tax / target.fuel_km : 0.0;
  rep.electricity_tax_per_km = target.electric_km > 0.0 ? target.electricity_tax / target.electric_km : 0.0;
  return rep;
}

void write_tax_report(const fs::path& path, const TaxReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "year,projected";
  for (Powertrain c : kAllClasses) out << ",stock_" << to_string(c);
  out << ",fuel_tax,electricity_tax,total,total_real,shortfall_vs_baseline\n";
  for (const TaxYear& t : report.years) {
    out << t.year << ',' << (t.projected ? 1 : 0);
    for (double s : t.stock) out << ',' << csv::fixed(s, 1);
    out << ',' << csv::fixed(t.fuel_tax, 2) << ',' << csv::fixed(t.electricity_tax, 2) << ','
        << csv::fixed(t.total, 2) << ',' << csv::fixed(t.total_real, 2) << ','
        << csv::fixed(report.baseline_mean - t.total_real, 2) << '\n';
  }
}

}  // namespace tollsim::tax
