#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "decaylab/errors.hpp"

namespace decaylab {

/// Metastable configuration of a helium-like atom; also labels the photon
/// emitted when that configuration decays.
enum class Species : std::uint8_t { Or = 0, Pa = 1 };

inline constexpr std::array<Species, 2> kAllSpecies{Species::Or, Species::Pa};

[[nodiscard]] constexpr Species companion(Species h) noexcept {
  return h == Species::Or ? Species::Pa : Species::Or;
}

[[nodiscard]] constexpr std::size_t index(Species h) noexcept {
  return static_cast<std::size_t>(h);
}

[[nodiscard]] constexpr std::string_view to_string(Species h) noexcept {
  return h == Species::Or ? "or" : "pa";
}

[[nodiscard]] inline Species parse_species(std::string_view s) {
  if (s == "or") return Species::Or;
  if (s == "pa") return Species::Pa;
  throw ParseError("unknown species '" + std::string(s) + "'");
}

enum class Side : std::uint8_t { L = 0, R = 1 };

[[nodiscard]] constexpr Side opposite(Side s) noexcept {
  return s == Side::L ? Side::R : Side::L;
}

[[nodiscard]] constexpr std::string_view to_string(Side s) noexcept {
  return s == Side::L ? "L" : "R";
}

[[nodiscard]] inline Side parse_side(std::string_view s) {
  if (s == "L") return Side::L;
  if (s == "R") return Side::R;
  throw ParseError("unknown side '" + std::string(s) + "'");
}

/// First = the disentangling emission; Second = emission by the surviving atom.
enum class Order : std::uint8_t { First = 0, Second = 1 };

[[nodiscard]] constexpr std::string_view to_string(Order o) noexcept {
  return o == Order::First ? "first" : "second";
}

[[nodiscard]] inline Order parse_order(std::string_view s) {
  if (s == "first") return Order::First;
  if (s == "second") return Order::Second;
  throw ParseError("unknown order '" + std::string(s) + "'");
}

}  // namespace decaylab
