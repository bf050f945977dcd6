#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace tollsim::tax {

enum class Powertrain : std::uint8_t { ICE_petrol, ICE_diesel, HEV_petrol, HEV_diesel, PHEV, BEV };

inline constexpr std::size_t kClassCount = 6;
inline constexpr std::array<Powertrain, kClassCount> kAllClasses = {
    Powertrain::ICE_petrol, Powertrain::ICE_diesel, Powertrain::HEV_petrol,
    Powertrain::HEV_diesel, Powertrain::PHEV,       Powertrain::BEV};

constexpr std::size_t index(Powertrain c) noexcept { return static_cast<std::size_t>(c); }
constexpr bool fuel_taxable(Powertrain c) noexcept { return c != Powertrain::BEV; }
constexpr bool grid_charged(Powertrain c) noexcept { return c == Powertrain::PHEV || c == Powertrain::BEV; }

std::string_view to_string(Powertrain c) noexcept;
std::optional<Powertrain> parse_powertrain(std::string_view s) noexcept;

template <typename T>
using PerClass = std::array<T, kClassCount>;

struct ClassYear {
  double car_stock = 0.0;
  double avg_mileage = 0.0;  // km per car and year
  double avg_fuel = 0.0;     // l/km
  double avg_e = 0.0;        // kWh/km
};

struct FleetYear {
  int year = 0;
  PerClass<ClassYear> classes{};
};

struct TaxRates {
  PerClass<double> fuel_tax_rate{};  // currency/l
  double e_tax_rate = 0.0;           // currency/kWh
  std::map<int, double> cpi;
};

/// Per-year consumption and mileage inputs by class.
struct Trajectories {
  std::map<int, PerClass<double>> avg_mileage;
  std::map<int, PerClass<double>> avg_fuel;
  std::map<int, PerClass<double>> avg_e;
};

/// stock(y+1) = stock(y) * (1 + g(y+1)) for every year up to `horizon`. Mileage and
/// consumption come from `traj` where present and are otherwise carried forward. Throws
/// Error if a growth rate is below -100%.
std::vector<FleetYear> project_stocks(const FleetYear& base, const std::map<int, PerClass<double>>& growth, int horizon,
                                      const Trajectories& traj = {});

/// Vehicle km driven by the class in that year.
double annual_mileage(const FleetYear& fy, Powertrain c);

/// Share of PHEV mileage driven on grid electricity.
struct SplitParams {
  double phev_electric_share = 0.5;
};

double fuel_tax_class(const FleetYear& fy, Powertrain c, const TaxRates& r, const SplitParams& s = {});
double electricity_tax_class(const FleetYear& fy, Powertrain c, const TaxRates& r, const SplitParams& s = {});
double fuel_tax(const FleetYear& fy, const TaxRates& r, const SplitParams& s = {});
double electricity_tax(const FleetYear& fy, const TaxRates& r, const SplitParams& s = {});

/// Km driven on fuel (PHEV counted with its fuel share) and on grid electricity.
double fuel_km(const FleetYear& fy, const SplitParams& s = {});
double electric_km(const FleetYear& fy, const SplitParams& s = {});

/// value * cpi[to] / cpi[from]. Throws Error on a missing year.
double cpi_adjust(double value, int from_year, int to_year, const TaxRates& r);

/// Mean of series over [first, last] minus the target-year value. Throws Error when a year is
/// missing from the series.
double shortfall(const std::map<int, double>& series, int first, int last, int target);

struct TaxInputs {
  std::string region;
  int reference_year = 2025;
  int target_year = 2030;
  int baseline_first_year = 2014;
  int baseline_last_year = 2023;
  SplitParams split;
  std::vector<FleetYear> history;                // observed stocks with their trajectories
  std::map<int, PerClass<double>> growth;        // projection years
  Trajectories trajectories;
  TaxRates rates;
};

/// Reads tax.json, stocks.csv, growth.csv, mileage.csv, fuel_consumption.csv,
/// electricity_consumption.csv, rates.csv and cpi.csv from `dir`.
TaxInputs load_tax_inputs(const std::filesystem::path& dir);

struct TaxYear {
  int year = 0;
  bool projected = false;
  PerClass<double> stock{};
  double fuel_tax = 0.0;
  double electricity_tax = 0.0;
  double total = 0.0;
  double total_real = 0.0;  // in reference-year prices
  double fuel_km = 0.0;
  double electric_km = 0.0;
};

struct TaxReport {
  std::vector<TaxYear> years;
  double baseline_mean = 0.0;
  double target_total = 0.0;
  double shortfall = 0.0;
  double fuel_tax_per_km = 0.0;         // target year
  double electricity_tax_per_km = 0.0;  // target year
};

/// History plus projection to the target year, taxes per year and the shortfall.
TaxReport run_tax_model(const TaxInputs& in);

void write_tax_report(const std::filesystem::path& path, const TaxReport& report);

}  // namespace tollsim::tax
