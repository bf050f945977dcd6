#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "tollsim/controller.hpp"
#include "tollsim/scenario.hpp"

namespace tollsim::cli {

struct GenerateOptions {
  std::optional<std::filesystem::path> spec_file;
  std::optional<std::string> layout;  // overrides the spec
  std::optional<int> agents;          // overrides the spec
  std::uint64_t seed = 4711;
  std::optional<int> iterations;      // stored in the scenario config
  std::filesystem::path out;
};

struct RunOptions {
  std::filesystem::path scenario;
  ScenarioKind kind = ScenarioKind::reference;
  std::optional<int> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> warm_start;
  std::filesystem::path out;
};

struct CompareOptions {
  std::filesystem::path reference;
  std::filesystem::path policy;
  std::filesystem::path out;
};

struct TaxOptions {
  std::filesystem::path inputs;
  std::optional<int> target_year;
  std::optional<int> baseline_first;
  std::optional<int> baseline_last;
  std::optional<std::filesystem::path> run;
  std::filesystem::path out;
};

/// Each command writes its outputs plus manifest.json into `out` and returns the manifest.
Json cmd_generate(const GenerateOptions& o);
Json cmd_run(const RunOptions& o);
Json cmd_compare(const CompareOptions& o);
Json cmd_tax(const TaxOptions& o);

}  // namespace tollsim::cli
