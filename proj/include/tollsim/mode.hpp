#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <string_view>

namespace tollsim {

enum class Mode : std::uint8_t { car, ride, pt, bicycle, walk, freight };

inline constexpr std::size_t kModeCount = 6;
inline constexpr std::array<Mode, kModeCount> kAllModes = {Mode::car, Mode::ride,    Mode::pt,
                                                           Mode::bicycle, Mode::walk, Mode::freight};

constexpr std::size_t index(Mode m) noexcept { return static_cast<std::size_t>(m); }

constexpr std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::car: return "car";
    case Mode::ride: return "ride";
    case Mode::pt: return "pt";
    case Mode::bicycle: return "bicycle";
    case Mode::walk: return "walk";
    case Mode::freight: return "freight";
  }
  return "?";
}

constexpr std::optional<Mode> parse_mode(std::string_view s) noexcept {
  for (Mode m : kAllModes) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

/// Car-class modes are loaded onto the network; everything else is teleported.
constexpr bool is_network_mode(Mode m) noexcept {
  return m == Mode::car || m == Mode::ride || m == Mode::freight;
}

constexpr bool is_teleported(Mode m) noexcept { return !is_network_mode(m); }

/// Per-mode value table.
template <typename T>
using PerMode = std::array<T, kModeCount>;

}  // namespace tollsim
