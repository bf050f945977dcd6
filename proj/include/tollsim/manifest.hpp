#pragma once

#include <filesystem>
#include <string>

#include "tollsim/config.hpp"
#include "tollsim/scenario.hpp"

namespace tollsim {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Hash over the identity of the population (ids, kinds, incomes, home zones, car
/// availability); plans are excluded so a run's output population keeps its input hash.
std::string population_hash(const Population& pop);
std::string config_hash(const Config& cfg);

/// Relative path -> SHA-256 for every regular file below `dir` except manifest.json, in
/// lexicographic order.
Json checksums(const std::filesystem::path& dir);

/// Adds the checksums of `dir` to `manifest` and writes dir/manifest.json.
void write_manifest(const std::filesystem::path& dir, Json manifest);
Json read_manifest(const std::filesystem::path& dir);

}  // namespace tollsim
